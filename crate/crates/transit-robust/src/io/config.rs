//! Flat `key = value` run configuration shared by all subcommands.
//!
//! Every key is optional. Delay distributions are written as `"zero"`,
//! `"point:M"`, `"geometric:PROB:MEAN:CAP"` or `"discrete:P0 P1 P2 ..."`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use transit_robust_core::features::FeatureCaps;
use transit_robust_core::robustness::{DelayDistribution, RobustnessConfig};
use transit_robust_core::search::SearchConfig;
use transit_robust_core::simulation::UtilityWeights;
use transit_robust_core::surrogate::{AdamConfig, TrainConfig};

use super::read_to_string;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub transfer_penalty: i64,
    pub stranding_penalty: i64,

    pub rt1_start_delay: i64,
    pub rt2_extra: i64,
    pub rt3_block: i64,
    pub rt3_anchor_offset: i64,
    pub rt4_replications: u32,
    pub rt4_drive_delays: String,
    pub rt4_trip_start_delays: String,
    pub master_seed: u64,

    pub traveltime_max: usize,
    pub transfers_max: usize,
    pub turnaround_max: usize,

    pub depth: usize,
    pub width: usize,
    pub phase1_epochs: usize,
    pub phase1_batch: usize,
    pub phase2_max_epochs: usize,
    pub phase2_batch: usize,
    pub patience: usize,
    pub validation_fraction: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Share of corpus rows held out as the test split by `ablate`.
    pub test_fraction: f64,

    pub per_kind: usize,
    pub delta: i64,
    pub reroute_every: usize,
    pub utility_budget: f64,
    pub max_iterations: usize,
    pub objective: [f64; 4],

    pub replicates: usize,
    pub chunk: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let r = RobustnessConfig::default();
        let t = TrainConfig::default();
        let s = SearchConfig::default();
        let c = FeatureCaps::default();
        RunConfig {
            transfer_penalty: r.weights.transfer_penalty,
            stranding_penalty: r.weights.stranding_penalty,
            rt1_start_delay: r.rt1_start_delay,
            rt2_extra: r.rt2_extra,
            rt3_block: r.rt3_block,
            rt3_anchor_offset: r.rt3_anchor_offset,
            rt4_replications: r.rt4_replications,
            rt4_drive_delays: format_distribution(&r.rt4_drive_delays),
            rt4_trip_start_delays: format_distribution(&r.rt4_trip_start_delays),
            master_seed: r.master_seed,
            traveltime_max: c.traveltime_max,
            transfers_max: c.transfers_max,
            turnaround_max: c.turnaround_max,
            depth: t.depth,
            width: t.width,
            phase1_epochs: t.phase1_epochs,
            phase1_batch: t.phase1_batch,
            phase2_max_epochs: t.phase2_max_epochs,
            phase2_batch: t.phase2_batch,
            patience: t.patience,
            validation_fraction: t.validation_fraction,
            learning_rate: t.adam.learning_rate,
            beta1: t.adam.beta1,
            beta2: t.adam.beta2,
            epsilon: t.adam.epsilon,
            test_fraction: 0.1,
            per_kind: s.per_kind,
            delta: s.delta,
            reroute_every: s.reroute_every,
            utility_budget: s.utility_budget,
            max_iterations: s.max_iterations,
            objective: s.objective,
            replicates: 1,
            chunk: 32,
        }
    }
}

pub fn format_distribution(d: &DelayDistribution) -> String {
    match d {
        DelayDistribution::Zero => "zero".into(),
        DelayDistribution::Geometric { prob, mean, cap } => format!("geometric:{prob:?}:{mean:?}:{cap}"),
        DelayDistribution::Discrete(p) => {
            format!("discrete:{}", p.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" "))
        }
    }
}

pub fn parse_distribution(s: &str) -> Result<DelayDistribution> {
    let bad = || Error::Invalid(format!("cannot parse delay distribution {s:?}"));
    let mut parts = s.trim().splitn(2, ':');
    let kind = parts.next().unwrap_or("");
    let rest = parts.next().unwrap_or("");
    let dist = match kind {
        "zero" if rest.is_empty() => DelayDistribution::Zero,
        "point" => {
            let m: i64 = rest.trim().parse().map_err(|_| bad())?;
            if m < 0 {
                return Err(bad());
            }
            DelayDistribution::point(m)
        }
        "geometric" => {
            let f: Vec<&str> = rest.split(':').collect();
            if f.len() != 3 {
                return Err(bad());
            }
            DelayDistribution::Geometric {
                prob: f[0].trim().parse().map_err(|_| bad())?,
                mean: f[1].trim().parse().map_err(|_| bad())?,
                cap: f[2].trim().parse().map_err(|_| bad())?,
            }
        }
        "discrete" => DelayDistribution::Discrete(
            rest.split_whitespace().map(|x| x.parse().map_err(|_| bad())).collect::<Result<_>>()?,
        ),
        _ => return Err(bad()),
    };
    dist.pmf()?;
    Ok(dist)
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(path, &read_to_string(path)?)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::format(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.robustness()?.validate()?;
        self.train().validate()?;
        self.search().validate()?;
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Invalid("test_fraction must lie in (0, 1)".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Invalid("replicates must be >= 1".into()));
        }
        Ok(())
    }

    pub fn weights(&self) -> UtilityWeights {
        UtilityWeights { transfer_penalty: self.transfer_penalty, stranding_penalty: self.stranding_penalty }
    }

    pub fn caps(&self) -> FeatureCaps {
        FeatureCaps {
            traveltime_max: self.traveltime_max,
            transfers_max: self.transfers_max,
            turnaround_max: self.turnaround_max,
        }
    }

    pub fn robustness(&self) -> Result<RobustnessConfig> {
        Ok(RobustnessConfig {
            rt1_start_delay: self.rt1_start_delay,
            rt2_extra: self.rt2_extra,
            rt3_block: self.rt3_block,
            rt3_anchor_offset: self.rt3_anchor_offset,
            rt4_replications: self.rt4_replications,
            rt4_drive_delays: parse_distribution(&self.rt4_drive_delays)?,
            rt4_trip_start_delays: parse_distribution(&self.rt4_trip_start_delays)?,
            master_seed: self.master_seed,
            weights: self.weights(),
        })
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            depth: self.depth,
            width: self.width,
            phase1_epochs: self.phase1_epochs,
            phase1_batch: self.phase1_batch,
            phase2_max_epochs: self.phase2_max_epochs,
            phase2_batch: self.phase2_batch,
            patience: self.patience,
            validation_fraction: self.validation_fraction,
            adam: AdamConfig {
                learning_rate: self.learning_rate,
                beta1: self.beta1,
                beta2: self.beta2,
                epsilon: self.epsilon,
            },
            seed: 0,
        }
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            per_kind: self.per_kind,
            delta: self.delta,
            reroute_every: self.reroute_every,
            utility_budget: self.utility_budget,
            max_iterations: self.max_iterations,
            objective: self.objective,
            caps: self.caps(),
            weights: self.weights(),
        }
    }
}
