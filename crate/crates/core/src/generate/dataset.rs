//! Artificial infrastructure networks with line concepts and demand.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::network::{Dataset, Line, NetworkEdge, PassengerGroup, PlanningParams, Station, StationId};
use crate::rng::{mix, rng_from_seed};
use crate::{Error, Minutes, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LineSpec {
    pub count: usize,
    /// Edges per line, inclusive range.
    pub min_edges: usize,
    pub max_edges: usize,
    /// Frequencies drawn uniformly per line; each must divide the period.
    pub frequencies: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandSpec {
    pub groups: usize,
    pub min_weight: u32,
    pub max_weight: u32,
    /// Earliest departures are drawn from `[start, end)`.
    pub departure_window: (Minutes, Minutes),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    pub min_drive: Minutes,
    pub max_drive: Minutes,
    /// `max_drive - min_drive` of each edge.
    pub span: Minutes,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    Grid { rows: usize, cols: usize },
    /// A center station, `rings` concentric cycles of `spokes` stations and
    /// radial edges along every spoke.
    Ring { rings: usize, spokes: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub topology: Topology,
    pub drives: DriveSpec,
    pub lines: LineSpec,
    pub demand: DemandSpec,
    pub params: PlanningParams,
    pub seed: u64,
}

impl DatasetSpec {
    /// 8 × 10 grid with 30 lines and about 1700 passengers.
    pub fn grid() -> Self {
        DatasetSpec {
            topology: Topology::Grid { rows: 8, cols: 10 },
            drives: DriveSpec { min_drive: 3, max_drive: 8, span: 3 },
            lines: LineSpec { count: 30, min_edges: 5, max_edges: 9, frequencies: vec![1] },
            demand: DemandSpec {
                groups: 300,
                min_weight: 1,
                max_weight: 10,
                departure_window: (0, 60),
            },
            // four periods carry every group to its destination
            params: PlanningParams { horizon: 4, ..PlanningParams::default() },
            seed: 1,
        }
    }

    /// Four rings of 40 spokes around a center with 37 lines.
    pub fn ring() -> Self {
        DatasetSpec {
            topology: Topology::Ring { rings: 4, spokes: 40 },
            lines: LineSpec { count: 37, min_edges: 6, max_edges: 12, frequencies: vec![1] },
            demand: DemandSpec { groups: 360, ..Self::grid().demand },
            ..Self::grid()
        }
    }
}

fn topology_edges(topology: &Topology) -> Result<(usize, Vec<(StationId, StationId)>)> {
    match *topology {
        Topology::Grid { rows, cols } => {
            if rows == 0 || cols == 0 || rows * cols < 2 {
                return Err(Error::InvalidConfig("grid needs at least two stations".into()));
            }
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Ok((rows * cols, edges))
        }
        Topology::Ring { rings, spokes } => {
            if rings == 0 || spokes < 3 {
                return Err(Error::InvalidConfig("ring needs >= 1 ring and >= 3 spokes".into()));
            }
            let id = |ring: usize, spoke: usize| 1 + ring * spokes + spoke;
            let mut edges = Vec::new();
            for s in 0..spokes {
                edges.push((0, id(0, s)));
            }
            for r in 0..rings {
                for s in 0..spokes {
                    edges.push((id(r, s), id(r, (s + 1) % spokes)));
                    if r + 1 < rings {
                        edges.push((id(r, s), id(r + 1, s)));
                    }
                }
            }
            Ok((1 + rings * spokes, edges))
        }
    }
}

/// Simple paths covering every edge: each new line starts on the lowest
/// uncovered edge and grows at both ends, preferring uncovered edges.
/// Lines beyond full coverage start on random edges. Coverage takes
/// precedence over the requested line count.
fn line_paths(
    stations: usize,
    edges: &[(StationId, StationId)],
    spec: &LineSpec,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<StationId>> {
    let mut adj: Vec<Vec<(StationId, usize)>> = vec![Vec::new(); stations];
    for (i, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut covered = vec![false; edges.len()];
    let mut paths = Vec::new();
    while paths.len() < spec.count || covered.iter().any(|c| !c) {
        let seed_edge = match covered.iter().position(|c| !c) {
            Some(e) => e,
            None => rng.random_range(0..edges.len()),
        };
        let target = rng.random_range(spec.min_edges.max(1)..=spec.max_edges.max(spec.min_edges).max(1));
        let (a, b) = edges[seed_edge];
        covered[seed_edge] = true;
        let mut path = alloc::collections::VecDeque::from(vec![a, b]);
        let mut on_path = vec![false; stations];
        on_path[a] = true;
        on_path[b] = true;
        let mut stuck = [false, false];
        while path.len() - 1 < target && !(stuck[0] && stuck[1]) {
            let back = rng.random_bool(0.5) && !stuck[1] || stuck[0];
            let end = if back { *path.back().unwrap() } else { *path.front().unwrap() };
            let options: Vec<(StationId, usize)> =
                adj[end].iter().copied().filter(|&(s, _)| !on_path[s]).collect();
            if options.is_empty() {
                stuck[usize::from(back)] = true;
                continue;
            }
            let fresh: Vec<(StationId, usize)> =
                options.iter().copied().filter(|&(_, e)| !covered[e]).collect();
            let pool = if fresh.is_empty() { &options } else { &fresh };
            let (next, e) = pool[rng.random_range(0..pool.len())];
            covered[e] = true;
            on_path[next] = true;
            if back {
                path.push_back(next);
            } else {
                path.push_front(next);
            }
        }
        paths.push(path.into_iter().collect());
    }
    paths
}

/// Builds a dataset from `spec`; deterministic in `spec.seed`.
pub fn gen_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    spec.params.validate()?;
    let (n, pairs) = topology_edges(&spec.topology)?;
    let d = &spec.drives;
    if d.min_drive < 1 || d.max_drive < d.min_drive || d.span < 0 || d.max_drive + d.span >= spec.params.period {
        return Err(Error::InvalidConfig("drive times must satisfy 1 <= min <= max, max + span < period".into()));
    }
    let dm = &spec.demand;
    if dm.min_weight == 0 || dm.max_weight < dm.min_weight || dm.departure_window.1 <= dm.departure_window.0 {
        return Err(Error::InvalidConfig("demand needs 1 <= min weight <= max weight and a non-empty window".into()));
    }
    if spec.lines.frequencies.is_empty() {
        return Err(Error::InvalidConfig("line spec needs at least one frequency".into()));
    }

    let mut rng = rng_from_seed(mix(spec.seed, 0));
    let stations = (0..n).map(|id| Station { id, name: format!("S{id}") }).collect();
    let edges: Vec<NetworkEdge> = pairs
        .iter()
        .enumerate()
        .map(|(id, &(from, to))| {
            let min_drive = rng.random_range(d.min_drive..=d.max_drive);
            NetworkEdge { id, from, to, min_drive, max_drive: min_drive + d.span }
        })
        .collect();

    let mut rng = rng_from_seed(mix(spec.seed, 1));
    let lines = line_paths(n, &pairs, &spec.lines, &mut rng)
        .into_iter()
        .enumerate()
        .map(|(id, station_path)| {
            let f = spec.lines.frequencies[rng.random_range(0..spec.lines.frequencies.len())];
            Line { id, station_path, frequency: f }
        })
        .collect();

    // gravity demand: P(o, d) proportional to deg(o) * deg(d)
    let mut degree = vec![0u64; n];
    for &(a, b) in &pairs {
        degree[a] += 1;
        degree[b] += 1;
    }
    let total: u64 = degree.iter().sum();
    let mut rng = rng_from_seed(mix(spec.seed, 2));
    let pick = |rng: &mut ChaCha8Rng| {
        let mut x = rng.random_range(0..total);
        degree.iter().position(|&w| {
            if x < w {
                true
            } else {
                x -= w;
                false
            }
        })
        .unwrap()
    };
    let mut groups = Vec::with_capacity(dm.groups);
    while groups.len() < dm.groups {
        let origin = pick(&mut rng);
        let destination = pick(&mut rng);
        if origin == destination {
            continue;
        }
        groups.push(PassengerGroup {
            origin,
            destination,
            earliest_departure: rng.random_range(dm.departure_window.0..dm.departure_window.1),
            weight: rng.random_range(dm.min_weight..=dm.max_weight),
        });
    }

    let dataset = Dataset::new(stations, edges, lines, groups, spec.params.clone())?;
    if !dataset.is_connected() {
        return Err(Error::InvalidDataset("generated network is disconnected".into()));
    }
    Ok(dataset)
}
