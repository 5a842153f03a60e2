use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Minutes, Result};

pub type StationId = usize;
pub type EdgeId = usize;
pub type LineId = usize;
pub type GroupId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Station {
    pub id: StationId,
    pub name: String,
}

/// An undirected direct connection between two stations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkEdge {
    pub id: EdgeId,
    pub from: StationId,
    pub to: StationId,
    pub min_drive: Minutes,
    pub max_drive: Minutes,
}

/// A line runs along `station_path` in both directions, `frequency` times per
/// period and direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub id: LineId,
    pub station_path: Vec<StationId>,
    pub frequency: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassengerGroup {
    pub origin: StationId,
    pub destination: StationId,
    pub earliest_departure: Minutes,
    pub weight: u32,
}

/// Bounds and operating parameters shared by every instance of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningParams {
    pub period: Minutes,
    pub min_wait: Minutes,
    pub max_wait: Minutes,
    pub min_transfer: Minutes,
    pub min_turnaround: Minutes,
    pub vehicle_capacity: u32,
    /// Number of periods rolled out into the day.
    pub horizon: u32,
}

impl Default for PlanningParams {
    fn default() -> Self {
        PlanningParams {
            period: 60,
            min_wait: 1,
            max_wait: 3,
            min_transfer: 2,
            min_turnaround: 5,
            vehicle_capacity: 100,
            horizon: 8,
        }
    }
}

impl PlanningParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidDataset(String::from(msg)));
        if self.period < 1 {
            return bad("period must be positive");
        }
        if self.min_wait < 0 || self.max_wait < self.min_wait {
            return bad("wait bounds must satisfy 0 <= min_wait <= max_wait");
        }
        if self.max_wait - self.min_wait >= self.period {
            return bad("wait span must be shorter than the period");
        }
        if self.min_transfer < 1 {
            return bad("min_transfer must be at least one minute");
        }
        if self.min_turnaround < 0 {
            return bad("min_turnaround must be nonnegative");
        }
        if self.vehicle_capacity == 0 {
            return bad("vehicle capacity must be positive");
        }
        if self.horizon == 0 {
            return bad("horizon must be at least one period");
        }
        Ok(())
    }
}

/// Infrastructure, line concept and demand. Fixed across all instances
/// derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub stations: Vec<Station>,
    pub edges: Vec<NetworkEdge>,
    pub lines: Vec<Line>,
    pub groups: Vec<PassengerGroup>,
    pub params: PlanningParams,
    edge_index: BTreeMap<(StationId, StationId), EdgeId>,
}

impl Dataset {
    pub fn new(
        stations: Vec<Station>,
        edges: Vec<NetworkEdge>,
        lines: Vec<Line>,
        groups: Vec<PassengerGroup>,
        params: PlanningParams,
    ) -> Result<Self> {
        let mut dataset = Dataset {
            stations,
            edges,
            lines,
            groups,
            params,
            edge_index: BTreeMap::new(),
        };
        dataset.validate()?;
        dataset.edge_index = dataset
            .edges
            .iter()
            .map(|e| (key(e.from, e.to), e.id))
            .collect();
        Ok(dataset)
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |msg: String| Err(Error::InvalidDataset(msg));
        for (i, s) in self.stations.iter().enumerate() {
            if s.id != i {
                return bad(format!("station ids must be dense, found {} at {}", s.id, i));
            }
        }
        let n = self.stations.len();
        let mut seen = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.id != i {
                return bad(format!("edge ids must be dense, found {} at {}", e.id, i));
            }
            if e.from >= n || e.to >= n {
                return bad(format!("edge {} references an unknown station", e.id));
            }
            if e.from == e.to {
                return bad(format!("edge {} is a loop", e.id));
            }
            if e.min_drive <= 0 || e.max_drive < e.min_drive {
                return bad(format!("edge {} must satisfy 0 < min_drive <= max_drive", e.id));
            }
            if e.max_drive - e.min_drive >= self.params.period {
                return bad(format!("edge {} drive span must be shorter than the period", e.id));
            }
            if seen.insert(key(e.from, e.to), e.id).is_some() {
                return bad(format!("edge {} duplicates another connection", e.id));
            }
        }
        for (i, l) in self.lines.iter().enumerate() {
            if l.id != i {
                return bad(format!("line ids must be dense, found {} at {}", l.id, i));
            }
            if l.station_path.len() < 2 {
                return bad(format!("line {} needs at least two stations", l.id));
            }
            if l.frequency == 0 || self.params.period % Minutes::from(l.frequency) != 0 {
                return bad(format!("line {} frequency must divide the period", l.id));
            }
            for w in l.station_path.windows(2) {
                if w[0] >= n || w[1] >= n || !seen.contains_key(&key(w[0], w[1])) {
                    return bad(format!(
                        "line {} uses {} -> {} which is not a network edge",
                        l.id, w[0], w[1]
                    ));
                }
            }
        }
        for (i, g) in self.groups.iter().enumerate() {
            if g.origin >= n || g.destination >= n {
                return bad(format!("group {} references an unknown station", i));
            }
            if g.origin == g.destination {
                return bad(format!("group {} has identical origin and destination", i));
            }
            if g.weight == 0 {
                return bad(format!("group {} has zero weight", i));
            }
        }
        Ok(())
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The network edge joining `a` and `b` in either direction.
    pub fn edge_between(&self, a: StationId, b: StationId) -> Option<EdgeId> {
        self.edge_index.get(&key(a, b)).copied()
    }

    pub fn total_passengers(&self) -> u64 {
        self.groups.iter().map(|g| u64::from(g.weight)).sum()
    }

    /// Whether the infrastructure graph is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.stations.len();
        if n == 0 {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(s) = stack.pop() {
            for &(t, _) in &adj[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<(StationId, Minutes)>> {
        let mut adj = vec![Vec::new(); self.stations.len()];
        for e in &self.edges {
            adj[e.from].push((e.to, e.min_drive));
            adj[e.to].push((e.from, e.min_drive));
        }
        adj
    }
}

fn key(a: StationId, b: StationId) -> (StationId, StationId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Minimal empty-drive times between all station pairs, used for turnaround
/// lower bounds when a vehicle changes terminals.
#[derive(Debug, Clone)]
pub struct DeadheadTable {
    n: usize,
    dist: Vec<Minutes>,
}

impl DeadheadTable {
    pub fn new(dataset: &Dataset) -> Self {
        let n = dataset.station_count();
        let inf = Minutes::MAX / 4;
        let mut dist = vec![inf; n * n];
        for i in 0..n {
            dist[i * n + i] = 0;
        }
        for e in &dataset.edges {
            let d = &mut dist[e.from * n + e.to];
            *d = (*d).min(e.min_drive);
            let d = &mut dist[e.to * n + e.from];
            *d = (*d).min(e.min_drive);
        }
        for k in 0..n {
            for i in 0..n {
                let ik = dist[i * n + k];
                if ik >= inf {
                    continue;
                }
                for j in 0..n {
                    let via = ik + dist[k * n + j];
                    if via < dist[i * n + j] {
                        dist[i * n + j] = via;
                    }
                }
            }
        }
        DeadheadTable { n, dist }
    }

    /// `None` when `b` is unreachable from `a`.
    pub fn time(&self, a: StationId, b: StationId) -> Option<Minutes> {
        let d = self.dist[a * self.n + b];
        (d < Minutes::MAX / 4).then_some(d)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Three stations in a row joined by two 10-minute edges, one line.
    pub(crate) fn chain_dataset(groups: Vec<PassengerGroup>) -> Dataset {
        let stations = (0..3)
            .map(|i| Station { id: i, name: alloc::format!("S{i}") })
            .collect();
        let edges = vec![
            NetworkEdge { id: 0, from: 0, to: 1, min_drive: 10, max_drive: 12 },
            NetworkEdge { id: 1, from: 1, to: 2, min_drive: 10, max_drive: 12 },
        ];
        let lines = vec![Line { id: 0, station_path: vec![0, 1, 2], frequency: 1 }];
        Dataset::new(stations, edges, lines, groups, PlanningParams::default()).unwrap()
    }

    #[test]
    fn rejects_line_off_network() {
        let stations = (0..3).map(|i| Station { id: i, name: String::new() }).collect();
        let edges = vec![NetworkEdge { id: 0, from: 0, to: 1, min_drive: 5, max_drive: 5 }];
        let lines = vec![Line { id: 0, station_path: vec![0, 2], frequency: 1 }];
        let err = Dataset::new(stations, edges, lines, vec![], PlanningParams::default());
        assert!(matches!(err, Err(Error::InvalidDataset(_))));
    }

    #[test]
    fn rejects_zero_drive_and_loops() {
        let stations: Vec<_> = (0..2).map(|i| Station { id: i, name: String::new() }).collect();
        let zero = vec![NetworkEdge { id: 0, from: 0, to: 1, min_drive: 0, max_drive: 1 }];
        assert!(Dataset::new(stations.clone(), zero, vec![], vec![], PlanningParams::default())
            .is_err());
        let looped = vec![NetworkEdge { id: 0, from: 1, to: 1, min_drive: 2, max_drive: 3 }];
        assert!(
            Dataset::new(stations, looped, vec![], vec![], PlanningParams::default()).is_err()
        );
    }

    #[test]
    fn deadhead_is_shortest_path() {
        let d = chain_dataset(vec![]);
        let table = DeadheadTable::new(&d);
        assert_eq!(table.time(0, 2), Some(20));
        assert_eq!(table.time(1, 1), Some(0));
        assert!(d.is_connected());
        assert_eq!(d.edge_between(2, 1), Some(1));
    }
}
