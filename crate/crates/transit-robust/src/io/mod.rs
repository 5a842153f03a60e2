//! On-disk formats.
//!
//! Tables are comma-separated with a header row and LF line endings; list
//! cells (paths, sequences) are space-separated ids. Writes go to a sibling
//! temporary file that is renamed into place.

pub mod config;
pub mod dataset;
pub mod instance;
pub mod model;
pub mod scenario;
pub mod tables;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .map(|r| r.map_err(|e| Error::format(path, e)))
        .collect()
}

/// Serializes `rows` under `header`; an empty table still gets its header.
pub fn csv_bytes<T: Serialize>(header: &[&str], rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Invalid(format!("csv serialization: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::Invalid(format!("csv serialization: {e}")))
}

pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    write_atomic(path, &csv_bytes(header, rows)?)
}

/// Plain records with a leading text column and numeric values, as used by
/// the feature, label and robustness tables.
pub fn write_named_rows(path: &Path, header: &[String], rows: &[(String, Vec<f64>)]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Invalid(format!("csv serialization: {e}"));
    w.write_record(header).map_err(fail)?;
    for (name, values) in rows {
        let mut rec = vec![name.clone()];
        rec.extend(values.iter().map(|v| format_f64(*v)));
        w.write_record(&rec).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("csv serialization: {e}")))?;
    write_atomic(path, &bytes)
}

/// Reads a table whose first column is an id and the rest are numbers.
pub fn read_named_rows(path: &Path) -> Result<(Vec<String>, Vec<(String, Vec<f64>)>)> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r.headers().map_err(|e| Error::format(path, e))?.iter().map(String::from).collect();
    if header.is_empty() {
        return Err(Error::format(path, "missing header"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        let values = rec
            .iter()
            .skip(1)
            .map(|c| c.trim().parse::<f64>().map_err(|e| Error::format(path, format!("{c:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push((rec[0].to_string(), values));
    }
    Ok((header, rows))
}

/// Shortest representation that parses back to the same value.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn join_ids<T: ToString>(ids: &[T]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub(crate) fn parse_ids<T: std::str::FromStr>(path: &Path, cell: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    cell.split_whitespace()
        .map(|s| s.parse().map_err(|e| Error::format(path, format!("bad id {s:?}: {e}"))))
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Invalid(format!("json: {e}")))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| Error::format(path, e))
}
