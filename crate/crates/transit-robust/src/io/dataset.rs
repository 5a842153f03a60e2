//! Dataset directories: `stations.csv`, `edges.csv`, `lines.csv`, `od.csv`
//! and the planning parameters in `params.conf`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use transit_robust_core::network::{Dataset, Line, NetworkEdge, PassengerGroup, PlanningParams, Station};

use super::{join_ids, parse_ids, read_csv, read_to_string, write_atomic, write_csv};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct LineRow {
    id: usize,
    frequency: u32,
    station_path: String,
}

#[derive(Serialize, Deserialize)]
struct StationRow {
    id: usize,
    name: String,
}

#[derive(Serialize, Deserialize)]
struct EdgeRow {
    id: usize,
    from: usize,
    to: usize,
    min_drive: i64,
    max_drive: i64,
}

#[derive(Serialize, Deserialize)]
struct OdRow {
    origin: usize,
    destination: usize,
    earliest_departure: i64,
    weight: u32,
}

/// `params.conf`; missing keys take their defaults.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub(crate) struct ParamsFile {
    period: i64,
    min_wait: i64,
    max_wait: i64,
    min_transfer: i64,
    min_turnaround: i64,
    vehicle_capacity: u32,
    horizon: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub(crate) depot: Option<usize>,
}

impl Default for ParamsFile {
    fn default() -> Self {
        ParamsFile::new(&PlanningParams::default(), None)
    }
}

impl ParamsFile {
    pub(crate) fn new(p: &PlanningParams, depot: Option<usize>) -> Self {
        ParamsFile {
            period: p.period,
            min_wait: p.min_wait,
            max_wait: p.max_wait,
            min_transfer: p.min_transfer,
            min_turnaround: p.min_turnaround,
            vehicle_capacity: p.vehicle_capacity,
            horizon: p.horizon,
            depot,
        }
    }

    fn params(&self) -> PlanningParams {
        PlanningParams {
            period: self.period,
            min_wait: self.min_wait,
            max_wait: self.max_wait,
            min_transfer: self.min_transfer,
            min_turnaround: self.min_turnaround,
            vehicle_capacity: self.vehicle_capacity,
            horizon: self.horizon,
        }
    }

    pub(crate) fn read(dir: &Path) -> Result<Self> {
        let path = dir.join("params.conf");
        toml::from_str(&read_to_string(&path)?).map_err(|e| Error::format(&path, e))
    }

    pub(crate) fn write(&self, dir: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Invalid(format!("params: {e}")))?;
        write_atomic(&dir.join("params.conf"), text.as_bytes())
    }
}

pub fn write_dataset(dir: &Path, d: &Dataset) -> Result<()> {
    write_dataset_files(dir, d)?;
    ParamsFile::new(&d.params, None).write(dir)
}

pub(crate) fn write_dataset_files(dir: &Path, d: &Dataset) -> Result<()> {
    let stations: Vec<StationRow> = d.stations.iter().map(|s| StationRow { id: s.id, name: s.name.clone() }).collect();
    write_csv(&dir.join("stations.csv"), &["id", "name"], &stations)?;
    let edges: Vec<EdgeRow> = d
        .edges
        .iter()
        .map(|e| EdgeRow { id: e.id, from: e.from, to: e.to, min_drive: e.min_drive, max_drive: e.max_drive })
        .collect();
    write_csv(&dir.join("edges.csv"), &["id", "from", "to", "min_drive", "max_drive"], &edges)?;
    let lines: Vec<LineRow> = d
        .lines
        .iter()
        .map(|l| LineRow { id: l.id, frequency: l.frequency, station_path: join_ids(&l.station_path) })
        .collect();
    write_csv(&dir.join("lines.csv"), &["id", "frequency", "station_path"], &lines)?;
    let od: Vec<OdRow> = d
        .groups
        .iter()
        .map(|g| OdRow {
            origin: g.origin,
            destination: g.destination,
            earliest_departure: g.earliest_departure,
            weight: g.weight,
        })
        .collect();
    write_csv(&dir.join("od.csv"), &["origin", "destination", "earliest_departure", "weight"], &od)
}

pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    Ok(read_dataset_with(dir)?.0)
}

pub(crate) fn read_dataset_with(dir: &Path) -> Result<(Dataset, ParamsFile)> {
    let params = ParamsFile::read(dir)?;
    let stations = read_csv::<StationRow>(&dir.join("stations.csv"))?
        .into_iter()
        .map(|r| Station { id: r.id, name: r.name })
        .collect();
    let edges = read_csv::<EdgeRow>(&dir.join("edges.csv"))?
        .into_iter()
        .map(|r| NetworkEdge { id: r.id, from: r.from, to: r.to, min_drive: r.min_drive, max_drive: r.max_drive })
        .collect();
    let lines_path = dir.join("lines.csv");
    let lines = read_csv::<LineRow>(&lines_path)?
        .into_iter()
        .map(|r| {
            Ok(Line { id: r.id, frequency: r.frequency, station_path: parse_ids(&lines_path, &r.station_path)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let groups = read_csv::<OdRow>(&dir.join("od.csv"))?
        .into_iter()
        .map(|r| PassengerGroup {
            origin: r.origin,
            destination: r.destination,
            earliest_departure: r.earliest_departure,
            weight: r.weight,
        })
        .collect();
    let dataset = Dataset::new(stations, edges, lines, groups, params.params())?;
    Ok((dataset, params))
}
