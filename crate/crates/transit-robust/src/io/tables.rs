//! Result tables: robustness values, labels, features and their layout,
//! training history and search traces.

use std::path::Path;

use serde::{Deserialize, Serialize};
use transit_robust_core::features::{FeatureCaps, FeatureLayout};
use transit_robust_core::search::{AcceptedSolution, IterationRecord, RealSeries};
use transit_robust_core::surrogate::{EpochRecord, Matrix};

use super::{format_f64, join_ids, parse_ids, read_csv, read_json, read_named_rows, write_csv, write_json, write_named_rows};
use crate::error::{Error, Result};

pub const RAW_COLUMNS: [&str; 4] = ["rt1_raw", "rt2_raw", "rt3_raw", "rt4_raw"];
pub const LABEL_COLUMNS: [&str; 4] = ["rt1", "rt2", "rt3", "rt4"];

/// Rows keyed by instance id.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Table { ids: Vec::new(), rows: Vec::new() }
    }

    pub fn push(&mut self, id: impl Into<String>, row: Vec<f64>) {
        self.ids.push(id.into());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn matrix(&self) -> Result<Matrix> {
        Ok(Matrix::from_rows(&self.rows)?)
    }

    pub fn quads(&self) -> Result<Vec<[f64; 4]>> {
        self.rows
            .iter()
            .map(|r| <[f64; 4]>::try_from(r.as_slice()).map_err(|_| Error::Invalid("expected four values per row".into())))
            .collect()
    }

    /// Reorders `other` to follow this table's ids.
    pub fn align(&self, other: &Table, what: &str) -> Result<Table> {
        if self.ids == other.ids {
            return Ok(other.clone());
        }
        let index: std::collections::HashMap<&str, usize> =
            other.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut out = Table::new();
        for id in &self.ids {
            let &i = index.get(id.as_str()).ok_or_else(|| Error::Invalid(format!("{what} has no row for {id}")))?;
            out.push(id.clone(), other.rows[i].clone());
        }
        Ok(out)
    }
}

impl Default for Table {
    fn default() -> Self {
        Table::new()
    }
}

fn write_table(path: &Path, columns: &[String], t: &Table) -> Result<()> {
    let mut header = vec!["instance_id".to_string()];
    header.extend(columns.iter().cloned());
    let rows: Vec<(String, Vec<f64>)> = t.ids.iter().cloned().zip(t.rows.iter().cloned()).collect();
    write_named_rows(path, &header, &rows)
}

fn read_table(path: &Path, expected: Option<&[&str]>) -> Result<Table> {
    let (header, rows) = read_named_rows(path)?;
    if header[0] != "instance_id" {
        return Err(Error::format(path, "first column must be instance_id"));
    }
    if let Some(cols) = expected {
        if header[1..] != *cols {
            return Err(Error::format(path, format!("expected columns instance_id,{}", cols.join(","))));
        }
    }
    let width = header.len() - 1;
    let mut t = Table::new();
    for (id, row) in rows {
        if row.len() != width {
            return Err(Error::format(path, format!("row {id} has {} values, expected {width}", row.len())));
        }
        t.push(id, row);
    }
    Ok(t)
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

pub fn write_robustness(path: &Path, t: &Table) -> Result<()> {
    write_table(path, &strings(&RAW_COLUMNS), t)
}

pub fn read_robustness(path: &Path) -> Result<Table> {
    read_table(path, Some(&RAW_COLUMNS))
}

pub fn write_labels(path: &Path, t: &Table) -> Result<()> {
    write_table(path, &strings(&LABEL_COLUMNS), t)
}

pub fn read_labels(path: &Path) -> Result<Table> {
    read_table(path, Some(&LABEL_COLUMNS))
}

/// Column names `f{group}_{offset}` of a feature vector.
pub fn feature_columns(layout: &FeatureLayout) -> Vec<String> {
    (1..=FeatureLayout::GROUPS)
        .flat_map(|f| layout.range(f).enumerate().map(move |(i, _)| format!("f{f}_{i}")))
        .collect()
}

pub fn write_features(path: &Path, layout: &FeatureLayout, t: &Table) -> Result<()> {
    write_table(path, &feature_columns(layout), t)
}

pub fn read_features(path: &Path) -> Result<Table> {
    read_table(path, None)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct GroupRange {
    feature: usize,
    start: usize,
    end: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct LayoutFile {
    stations: usize,
    edges: usize,
    traveltime_max: usize,
    transfers_max: usize,
    turnaround_max: usize,
    length: usize,
    groups: Vec<GroupRange>,
}

pub fn write_layout(path: &Path, layout: &FeatureLayout) -> Result<()> {
    let groups = (1..=FeatureLayout::GROUPS)
        .map(|f| {
            let r = layout.range(f);
            GroupRange { feature: f, start: r.start, end: r.end }
        })
        .collect();
    write_json(
        path,
        &LayoutFile {
            stations: layout.stations,
            edges: layout.edges,
            traveltime_max: layout.caps.traveltime_max,
            transfers_max: layout.caps.transfers_max,
            turnaround_max: layout.caps.turnaround_max,
            length: layout.len(),
            groups,
        },
    )
}

pub fn read_layout(path: &Path) -> Result<FeatureLayout> {
    let f: LayoutFile = read_json(path)?;
    let caps = FeatureCaps {
        traveltime_max: f.traveltime_max,
        transfers_max: f.transfers_max,
        turnaround_max: f.turnaround_max,
    };
    let layout = FeatureLayout::new(f.stations, f.edges, caps);
    if layout.len() != f.length {
        return Err(Error::format(path, format!("length {} does not match the layout ({})", f.length, layout.len())));
    }
    Ok(layout)
}

#[derive(Serialize, Deserialize)]
struct HistoryRow {
    epoch: usize,
    phase: u8,
    train_loss: f64,
    val_loss: f64,
}

pub fn write_history(path: &Path, history: &[EpochRecord]) -> Result<()> {
    let rows: Vec<HistoryRow> = history
        .iter()
        .map(|h| HistoryRow { epoch: h.epoch, phase: h.phase, train_loss: h.train_loss, val_loss: h.val_loss })
        .collect();
    write_csv(path, &["epoch", "phase", "train_loss", "val_loss"], &rows)
}

pub fn read_history(path: &Path) -> Result<Vec<EpochRecord>> {
    Ok(read_csv::<HistoryRow>(path)?
        .into_iter()
        .map(|h| EpochRecord { epoch: h.epoch, phase: h.phase, train_loss: h.train_loss, val_loss: h.val_loss })
        .collect())
}

/// `trace.csv`; `accepted` holds the activity that received slack, empty
/// when the iteration found no improving neighbor.
pub fn write_trace(path: &Path, records: &[IterationRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.iteration.to_string(), r.accepted.map(|a| a.to_string()).unwrap_or_default()];
            row.extend(r.estimate.iter().map(|v| format_f64(*v)));
            row.push(r.utility.to_string());
            row.push(r.rerouted.to_string());
            row
        })
        .collect();
    write_csv(path, &["iter", "accepted", "est_rt1", "est_rt2", "est_rt3", "est_rt4", "utility", "rerouted"], &rows)
}

#[derive(Serialize, Deserialize)]
struct SolutionRow {
    iter: usize,
    est_rt1: f64,
    est_rt2: f64,
    est_rt3: f64,
    est_rt4: f64,
    times: String,
}

/// Every visited solution's event times, starting with iteration 0.
pub fn write_solutions(path: &Path, solutions: &[AcceptedSolution]) -> Result<()> {
    let rows: Vec<SolutionRow> = solutions
        .iter()
        .map(|s| SolutionRow {
            iter: s.iteration,
            est_rt1: s.estimate[0],
            est_rt2: s.estimate[1],
            est_rt3: s.estimate[2],
            est_rt4: s.estimate[3],
            times: join_ids(&s.times),
        })
        .collect();
    write_csv(path, &["iter", "est_rt1", "est_rt2", "est_rt3", "est_rt4", "times"], &rows)
}

pub fn read_solutions(path: &Path) -> Result<Vec<AcceptedSolution>> {
    read_csv::<SolutionRow>(path)?
        .into_iter()
        .map(|r| {
            Ok(AcceptedSolution {
                iteration: r.iter,
                times: parse_ids(path, &r.times)?,
                estimate: [r.est_rt1, r.est_rt2, r.est_rt3, r.est_rt4],
            })
        })
        .collect()
}

/// `trace_real.csv` plus a summary row: the relative improvements and the
/// final estimated-minus-real gap.
pub fn write_trace_real(path: &Path, series: &RealSeries) -> Result<()> {
    let mut header = vec!["iter".to_string()];
    for prefix in ["est", "real_raw", "real"] {
        header.extend((1..=4).map(|i| format!("{prefix}_rt{i}")));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = series
        .records
        .iter()
        .map(|r| {
            let mut row = vec![r.iteration.to_string()];
            row.extend(r.estimate.iter().chain(&r.real_raw).chain(&r.real).map(|v| format_f64(*v)));
            row
        })
        .collect();
    write_csv(path, &header, &rows)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct RealSummary {
    pub estimated_improvement: f64,
    pub real_improvement: f64,
    pub final_gap: f64,
}

impl From<&RealSeries> for RealSummary {
    fn from(s: &RealSeries) -> Self {
        RealSummary {
            estimated_improvement: s.estimated_improvement,
            real_improvement: s.real_improvement,
            final_gap: s.final_gap,
        }
    }
}
