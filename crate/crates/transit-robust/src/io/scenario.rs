//! Delay scenarios as JSON lines:
//! `{"source_delays":[[trip,min]],"edge_slowdowns":[[edge,min,start,end]],
//! "station_blockings":[[station,start,dur]],"seed":u64}`, with an optional
//! `"activity_delays":[[activity,min]]`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use transit_robust_core::simulation::{DelayScenario, EdgeSlowdown, StationBlocking};

use super::{read_to_string, write_atomic};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
struct ScenarioLine {
    #[serde(default)]
    source_delays: Vec<(usize, i64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    activity_delays: Vec<(usize, i64)>,
    #[serde(default)]
    edge_slowdowns: Vec<(usize, i64, i64, i64)>,
    #[serde(default)]
    station_blockings: Vec<(usize, i64, i64)>,
    #[serde(default)]
    seed: u64,
}

impl From<&DelayScenario> for ScenarioLine {
    fn from(s: &DelayScenario) -> Self {
        ScenarioLine {
            source_delays: s.source_delays.clone(),
            activity_delays: s.activity_delays.clone(),
            edge_slowdowns: s.edge_slowdowns.iter().map(|e| (e.edge, e.extra, e.start, e.end)).collect(),
            station_blockings: s.station_blockings.iter().map(|b| (b.station, b.start, b.duration)).collect(),
            seed: s.seed,
        }
    }
}

impl From<ScenarioLine> for DelayScenario {
    fn from(l: ScenarioLine) -> Self {
        DelayScenario {
            source_delays: l.source_delays,
            activity_delays: l.activity_delays,
            edge_slowdowns: l
                .edge_slowdowns
                .into_iter()
                .map(|(edge, extra, start, end)| EdgeSlowdown { edge, extra, start, end })
                .collect(),
            station_blockings: l
                .station_blockings
                .into_iter()
                .map(|(station, start, duration)| StationBlocking { station, start, duration })
                .collect(),
            seed: l.seed,
        }
    }
}

pub fn parse_scenarios(path: &Path, text: &str) -> Result<Vec<DelayScenario>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<ScenarioLine>(l)
                .map(DelayScenario::from)
                .map_err(|e| Error::format(path, format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn read_scenarios(path: &Path) -> Result<Vec<DelayScenario>> {
    parse_scenarios(path, &read_to_string(path)?)
}

pub fn write_scenarios(path: &Path, scenarios: &[DelayScenario]) -> Result<()> {
    let mut out = Vec::new();
    for s in scenarios {
        serde_json::to_writer(&mut out, &ScenarioLine::from(s)).map_err(|e| Error::Invalid(format!("json: {e}")))?;
        out.push(b'\n');
    }
    write_atomic(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_shape() {
        let text = r#"{"source_delays":[[3,5]],"edge_slowdowns":[[1,2,0,60]],"station_blockings":[[4,10,15]],"seed":9}

{"source_delays":[],"edge_slowdowns":[],"station_blockings":[],"seed":0,"activity_delays":[[7,1]]}"#;
        let s = parse_scenarios(Path::new("x"), text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].source_delays, vec![(3, 5)]);
        assert_eq!(s[0].edge_slowdowns, vec![EdgeSlowdown { edge: 1, extra: 2, start: 0, end: 60 }]);
        assert_eq!(s[0].station_blockings, vec![StationBlocking { station: 4, start: 10, duration: 15 }]);
        assert_eq!(s[0].seed, 9);
        assert_eq!(s[1].activity_delays, vec![(7, 1)]);
    }

    #[test]
    fn rejects_unknown_keys_with_line_number() {
        let err = parse_scenarios(Path::new("x"), "{}\n{\"delays\":[]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn roundtrip() {
        let s = DelayScenario {
            source_delays: vec![(1, 2)],
            activity_delays: vec![(0, 3)],
            edge_slowdowns: vec![EdgeSlowdown { edge: 0, extra: 1, start: 5, end: 6 }],
            station_blockings: vec![],
            seed: 11,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.jsonl");
        write_scenarios(&p, &[s.clone(), DelayScenario::default()]).unwrap();
        assert_eq!(read_scenarios(&p).unwrap(), vec![s, DelayScenario::default()]);
    }
}
