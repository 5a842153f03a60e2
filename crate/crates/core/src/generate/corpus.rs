//! Labeled instance corpora.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::schedule::{gen_schedule, ScheduleStrategy};
use super::timetable::{gen_timetable, TimetableStrategy};
use crate::features::{extract, FeatureCaps};
use crate::network::{attach_turnarounds, roll_out, Dataset, EventActivityNetwork};
use crate::par::map_indexed;
use crate::rng::mix;
use crate::robustness::{evaluate, RobustnessConfig};
use crate::simulation::UtilityWeights;
use crate::{Instance, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantSpec {
    pub timetable: TimetableStrategy,
    pub schedule: ScheduleStrategy,
    /// Line offsets of the underlying timetable, shared by all replicates.
    pub base: u64,
    /// Source of per-replicate randomness (slack placement).
    pub seed: u64,
}

impl VariantSpec {
    /// Seed of replicate `r` of this variant.
    pub fn instance_seed(&self, r: usize) -> u64 {
        mix(self.seed, r as u64)
    }

    /// Deterministic variants give the same instance for every seed.
    pub fn is_random(&self) -> bool {
        matches!(self.timetable, TimetableStrategy::RandomSlack(b) if b > 0)
    }

    /// Distinct instances this variant contributes for `replicates`.
    pub fn instances(&self, replicates: usize) -> usize {
        if self.is_random() { replicates } else { replicates.min(1) }
    }
}

/// A few base timetables, each buffered by several strategies and crossed
/// with tight and buffered vehicle schedules.
pub fn default_variants(seed: u64) -> Vec<VariantSpec> {
    let timetables = [
        TimetableStrategy::EarliestFeasible,
        TimetableStrategy::UniformBuffer(1),
        TimetableStrategy::UniformBuffer(2),
        TimetableStrategy::RandomSlack(60),
        TimetableStrategy::RandomSlack(200),
        TimetableStrategy::RandomSlack(500),
    ];
    let schedules = [
        ScheduleStrategy::FirstFit,
        ScheduleStrategy::BufferedTurnaround(5),
        ScheduleStrategy::BufferedTurnaround(15),
        ScheduleStrategy::BufferedTurnaround(u32::MAX),
    ];
    let mut out = Vec::new();
    for b in 0..4 {
        let base = mix(seed, 1 << 32 | b);
        for t in timetables {
            for s in schedules {
                out.push(VariantSpec { timetable: t, schedule: s, base, seed: mix(seed, out.len() as u64) });
            }
        }
    }
    out
}

/// Timetable, roll-out, vehicle schedule and planned routes for replicate
/// `replicate` of `variant`. `periodic` must be the periodic network of
/// `dataset`.
pub fn build_instance(
    dataset: &Arc<Dataset>,
    periodic: &EventActivityNetwork,
    variant: &VariantSpec,
    replicate: usize,
    weights: &UtilityWeights,
) -> Result<Instance> {
    let tt = gen_timetable(dataset, periodic, variant.timetable, variant.base, variant.instance_seed(replicate))?;
    let (mut network, aperiodic) = roll_out(periodic, &tt, dataset.params.horizon)?;
    let vs = gen_schedule(dataset, &network, &aperiodic, variant.schedule);
    attach_turnarounds(&mut network, &vs, dataset)?;
    Ok(Instance::new(dataset.clone(), network, aperiodic, vs)?.with_planned_routes(weights))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    /// Replicates per random variant; deterministic variants appear once.
    pub replicates: usize,
    pub robustness: RobustnessConfig,
    pub caps: FeatureCaps,
    /// Instances labeled together before being handed to the sink.
    pub chunk: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            replicates: 1,
            robustness: RobustnessConfig::default(),
            caps: FeatureCaps::default(),
            chunk: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    /// Position in the corpus: variant-major, then replicate.
    pub index: usize,
    pub variant: usize,
    pub replicate: usize,
    pub seed: u64,
    pub features: Vec<f64>,
    pub raw: [f64; 4],
}

/// Generates and labels the instances of every variant, handing each to
/// `sink` in index order. Instances are dropped after the sink returns, so
/// memory stays bounded by one chunk.
pub fn gen_corpus<F>(
    dataset: &Arc<Dataset>,
    variants: &[VariantSpec],
    config: &CorpusConfig,
    mut sink: F,
) -> Result<()>
where
    F: FnMut(CorpusEntry, &Instance) -> Result<()>,
{
    config.robustness.validate()?;
    let periodic = EventActivityNetwork::periodic(dataset)?;
    // (variant, replicate) of every corpus position
    let slots: Vec<(usize, usize)> = variants
        .iter()
        .enumerate()
        .flat_map(|(v, spec)| (0..spec.instances(config.replicates)).map(move |r| (v, r)))
        .collect();
    let total = slots.len();
    let weights = config.robustness.weights;
    let mut start = 0;
    while start < total {
        let len = config.chunk.max(1).min(total - start);
        let labeled: Vec<Result<(CorpusEntry, Instance)>> = map_indexed(len, |i| {
            let index = start + i;
            let (variant, replicate) = slots[index];
            let v = &variants[variant];
            let seed = v.instance_seed(replicate);
            let inst = build_instance(dataset, &periodic, v, replicate, &weights)?;
            let features = extract(&inst, &config.caps, &weights)?;
            let raw = evaluate(&inst, &config.robustness)?.raw;
            Ok((CorpusEntry { index, variant, replicate, seed, features, raw }, inst))
        });
        for r in labeled {
            let (entry, inst) = r?;
            sink(entry, &inst)?;
        }
        start += len;
    }
    Ok(())
}

/// Collects a corpus in memory.
pub fn collect_corpus(
    dataset: &Arc<Dataset>,
    variants: &[VariantSpec],
    config: &CorpusConfig,
) -> Result<Vec<CorpusEntry>> {
    let mut out = vec![];
    gen_corpus(dataset, variants, config, |e, _| {
        out.push(e);
        Ok(())
    })?;
    Ok(out)
}
