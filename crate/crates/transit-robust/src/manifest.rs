//! Per-run provenance: what ran, on which inputs, with which seeds.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::write_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    /// Resolved configuration in `key = value` form.
    pub config: String,
    pub inputs: Vec<InputHash>,
    pub seeds: BTreeMap<String, u64>,
    pub threads: usize,
    pub timings_ms: BTreeMap<String, f64>,
}

/// Hex SHA-256 of a file, or of the sorted `name\0contents` entries of the
/// files directly inside a directory.
pub fn hash_path(path: &Path) -> Result<String> {
    let mut h = Sha256::new();
    if path.is_dir() {
        let mut names: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_file())
            .map(|e| e.file_name())
            .collect();
        names.sort();
        for name in names {
            let p = path.join(&name);
            h.update(name.to_string_lossy().as_bytes());
            h.update([0]);
            h.update(std::fs::read(&p).map_err(|e| Error::io(&p, e))?);
        }
    } else {
        h.update(std::fs::read(path).map_err(|e| Error::io(path, e))?);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Collects manifest fields while a subcommand runs.
#[derive(Debug)]
pub struct ManifestBuilder {
    manifest: RunManifest,
    started: Instant,
    phase: Instant,
}

impl ManifestBuilder {
    pub fn new(subcommand: &str, config: String, threads: usize) -> Self {
        ManifestBuilder {
            manifest: RunManifest {
                subcommand: subcommand.into(),
                tool_version: env!("CARGO_PKG_VERSION").into(),
                config,
                inputs: Vec::new(),
                seeds: BTreeMap::new(),
                threads,
                timings_ms: BTreeMap::new(),
            },
            started: Instant::now(),
            phase: Instant::now(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let sha256 = hash_path(path)?;
        self.manifest.inputs.push(InputHash { path: path.display().to_string(), sha256 });
        Ok(())
    }

    pub fn seed(&mut self, name: &str, seed: u64) {
        self.manifest.seeds.insert(name.into(), seed);
    }

    /// Records the time since the previous phase ended.
    pub fn phase(&mut self, name: &str) {
        let ms = self.phase.elapsed().as_secs_f64() * 1e3;
        self.manifest.timings_ms.insert(name.into(), ms);
        self.phase = Instant::now();
    }

    pub fn finish(mut self, path: &Path) -> Result<RunManifest> {
        let total = self.started.elapsed().as_secs_f64() * 1e3;
        self.manifest.timings_ms.insert("total".into(), total);
        write_json(path, &self.manifest)?;
        Ok(self.manifest)
    }
}
