//! Key-feature extraction and input scaling.
//!
//! The vector concatenates nine groups:
//!
//! | # | per        | value                                             |
//! |---|------------|---------------------------------------------------|
//! | 1 | edge       | mean occupancy (%) of drive activities            |
//! | 2 | minute bin | groups by perceived travel time                   |
//! | 3 | count bin  | passenger share by number of transfers            |
//! | 4 | station    | mean wait slack                                   |
//! | 5 | station    | mean transfer slack                               |
//! | 6 | station    | passenger share of transfers                      |
//! | 7 | station    | summed frequency of serving lines                 |
//! | 8 | station    | share of events                                   |
//! | 9 | minute bin | trips by slack of their outgoing turnaround       |
//!
//! Bin `i` counts value `i`; the last bin absorbs everything larger.
//! Stranded groups count in the last bin of groups 2 and 3.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use libm::sqrt;

use crate::network::ActivityKind;
use crate::simulation::{perceived_time, UtilityWeights};
use crate::{Error, Instance, Minutes, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureCaps {
    pub traveltime_max: usize,
    pub transfers_max: usize,
    pub turnaround_max: usize,
}

impl Default for FeatureCaps {
    fn default() -> Self {
        FeatureCaps { traveltime_max: 240, transfers_max: 10, turnaround_max: 30 }
    }
}

impl FeatureCaps {
    pub fn validate(&self) -> Result<()> {
        if self.traveltime_max == 0 || self.turnaround_max == 0 {
            return Err(Error::InvalidConfig("feature caps must be > 0".into()));
        }
        Ok(())
    }
}

/// Index map of a feature vector for a dataset with `stations` stations and
/// `edges` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureLayout {
    pub stations: usize,
    pub edges: usize,
    pub caps: FeatureCaps,
}

impl FeatureLayout {
    pub const GROUPS: usize = 9;

    pub fn new(stations: usize, edges: usize, caps: FeatureCaps) -> Self {
        FeatureLayout { stations, edges, caps }
    }

    pub fn for_instance(instance: &Instance, caps: FeatureCaps) -> Self {
        Self::new(instance.dataset.station_count(), instance.dataset.edge_count(), caps)
    }

    fn group_len(&self, feature: usize) -> usize {
        match feature {
            1 => self.edges,
            2 => self.caps.traveltime_max,
            3 => self.caps.transfers_max + 1,
            4..=8 => self.stations,
            9 => self.caps.turnaround_max,
            _ => panic!("feature group {feature} out of 1..=9"),
        }
    }

    /// Index range of feature group `feature` (1-based).
    pub fn range(&self, feature: usize) -> Range<usize> {
        let start: usize = (1..feature).map(|f| self.group_len(f)).sum();
        start..start + self.group_len(feature)
    }

    pub fn len(&self) -> usize {
        self.range(Self::GROUPS).end
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(feature group, index within the group)` of a vector index.
    pub fn locate(&self, index: usize) -> Option<(usize, usize)> {
        (1..=Self::GROUPS).find_map(|f| {
            let r = self.range(f);
            r.contains(&index).then(|| (f, index - r.start))
        })
    }

    /// Group of every index, in order.
    pub fn group_of_indices(&self) -> Vec<usize> {
        (1..=Self::GROUPS).flat_map(|f| core::iter::repeat(f).take(self.group_len(f))).collect()
    }
}

fn bin(value: i64, cap: usize) -> usize {
    (value.max(0) as usize).min(cap - 1)
}

fn share(values: &mut [f64]) {
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        values.iter_mut().for_each(|v| *v /= total);
    }
}

/// Feature vector of a routed instance.
pub fn extract(instance: &Instance, caps: &FeatureCaps, weights: &UtilityWeights) -> Result<Vec<f64>> {
    extract_with_times(instance, &instance.timetable.times, caps, weights)
}

/// Feature vector of `instance` retimed to `times`, keeping its routes and
/// loads.
pub fn extract_with_times(
    instance: &Instance,
    times: &[Minutes],
    caps: &FeatureCaps,
    weights: &UtilityWeights,
) -> Result<Vec<f64>> {
    caps.validate()?;
    if times.len() != instance.network.events.len() {
        return Err(Error::DimensionMismatch { expected: instance.network.events.len(), got: times.len() });
    }
    if !instance.has_routes() {
        return Err(Error::MissingRoutes);
    }
    let d = &*instance.dataset;
    let net = &instance.network;
    let layout = FeatureLayout::for_instance(instance, *caps);
    let n = d.station_count();
    let mut out = vec![0.0; layout.len()];

    // 1: occupancy
    let capacity = f64::from(instance.schedule.vehicle_capacity.max(1));
    let f1 = &mut out[layout.range(1)];
    for (edge, slot) in f1.iter_mut().enumerate() {
        let drives = instance.drives_on_edge(edge);
        if !drives.is_empty() {
            let sum: f64 = drives
                .iter()
                .map(|&a| 100.0 * net.activities[a].passenger_load as f64 / capacity)
                .sum();
            *slot = sum / drives.len() as f64;
        }
    }

    // 2, 3, 6: passenger routes
    let mut travel = vec![0.0; caps.traveltime_max];
    let mut transfers = vec![0.0; caps.transfers_max + 1];
    let mut transfer_share = vec![0.0; n];
    for r in instance.routes() {
        let g = &d.groups[r.group];
        let w = f64::from(g.weight);
        if r.is_stranded() {
            travel[caps.traveltime_max - 1] += 1.0;
            transfers[caps.transfers_max] += w;
            continue;
        }
        travel[bin(perceived_time(r, g, net, times, weights), caps.traveltime_max)] += 1.0;
        transfers[(r.transfers as usize).min(caps.transfers_max)] += w;
        for &a in &r.activities {
            let act = &net.activities[a];
            if act.kind == ActivityKind::Transfer {
                transfer_share[net.events[act.tail].station] += w;
            }
        }
    }
    share(&mut transfers);
    share(&mut transfer_share);

    // 4, 5: mean slack per station
    let mut slack_sum = [vec![0.0; n], vec![0.0; n]];
    let mut slack_count = [vec![0usize; n], vec![0usize; n]];
    for a in &net.activities {
        let k = match a.kind {
            ActivityKind::Wait => 0,
            ActivityKind::Transfer => 1,
            _ => continue,
        };
        let s = net.events[a.tail].station;
        slack_sum[k][s] += (times[a.head] - times[a.tail] - a.lower) as f64;
        slack_count[k][s] += 1;
    }

    // 7: line frequencies, 8: events
    let mut frequency = vec![0.0; n];
    for line in &d.lines {
        let mut seen = vec![false; n];
        for &s in &line.station_path {
            if !core::mem::replace(&mut seen[s], true) {
                frequency[s] += f64::from(line.frequency);
            }
        }
    }
    let mut events = vec![0.0; n];
    for e in &net.events {
        events[e.station] += 1.0;
    }
    share(&mut events);

    // 9: turnaround slack per trip
    let mut turnaround = vec![0.0; caps.turnaround_max];
    for a in net.activities_of(ActivityKind::Turnaround) {
        turnaround[bin(times[a.head] - times[a.tail] - a.lower, caps.turnaround_max)] += 1.0;
    }

    out[layout.range(2)].copy_from_slice(&travel);
    out[layout.range(3)].copy_from_slice(&transfers);
    for (k, f) in [(0, 4), (1, 5)] {
        for (s, slot) in out[layout.range(f)].iter_mut().enumerate() {
            if slack_count[k][s] > 0 {
                *slot = slack_sum[k][s] / slack_count[k][s] as f64;
            }
        }
    }
    out[layout.range(6)].copy_from_slice(&transfer_share);
    out[layout.range(7)].copy_from_slice(&frequency);
    out[layout.range(8)].copy_from_slice(&events);
    out[layout.range(9)].copy_from_slice(&turnaround);
    Ok(out)
}

/// Per-column z-score with population statistics. Constant columns are only
/// centered.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    pub fn fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("training matrix"))?.as_ref();
        let cols = first.len();
        let count = rows.len() as f64;
        let mut mean = vec![0.0; cols];
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            mean.iter_mut().zip(r).for_each(|(m, x)| *m += x);
        }
        mean.iter_mut().for_each(|m| *m /= count);
        let mut var = vec![0.0; cols];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r.as_ref()).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var.into_iter().map(|v| sqrt(v / count)).collect();
        Ok(Scaler { mean, std })
    }

    /// Scaler that leaves inputs unchanged.
    pub fn identity(cols: usize) -> Self {
        Scaler { mean: vec![0.0; cols], std: vec![1.0; cols] }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = x.to_vec();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, x: &mut [f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        for ((v, m), s) in x.iter_mut().zip(&self.mean).zip(&self.std) {
            *v -= m;
            if *s > 0.0 {
                *v /= s;
            }
        }
        Ok(())
    }
}
