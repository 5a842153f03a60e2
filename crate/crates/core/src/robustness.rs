//! The four robustness tests and cross-instance normalization.
//!
//! Every test is a series of independent simulations; its raw value is the
//! sum (RT-1..RT-3) or mean (RT-4) of their aggregate perceived delays.
//! Simulations may run in parallel but are always reduced in index order.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::network::ActivityKind;
use crate::par::map_indexed;
use crate::rng::{mix, rng_from_seed};
use crate::simulation::{
    simulate, DelayScenario, EdgeSlowdown, StationBlocking, UtilityWeights,
};
use crate::{Error, Instance, Minutes, Result};

/// Delay size distribution in whole minutes.
#[derive(Debug, Clone, PartialEq)]
pub enum DelayDistribution {
    Zero,
    /// Delayed with probability `prob`; the delay is geometric on 1, 2, ...
    /// with the given mean and truncated at `cap` (the tail mass sits on
    /// `cap`).
    Geometric { prob: f64, mean: f64, cap: Minutes },
    /// Probability of each delay 0, 1, 2, ... minutes.
    Discrete(Vec<f64>),
}

impl DelayDistribution {
    /// Point mass on `minutes`.
    pub fn point(minutes: Minutes) -> Self {
        let mut pmf = vec![0.0; minutes as usize + 1];
        pmf[minutes as usize] = 1.0;
        DelayDistribution::Discrete(pmf)
    }

    /// Probability of 0, 1, ..., max minutes.
    pub fn pmf(&self) -> Result<Vec<f64>> {
        let pmf = match self {
            DelayDistribution::Zero => vec![1.0],
            DelayDistribution::Geometric { prob, mean, cap } => {
                if !(0.0..=1.0).contains(prob) || *mean < 1.0 || *cap < 1 {
                    return Err(Error::InvalidConfig(
                        "geometric delay needs 0 <= prob <= 1, mean >= 1, cap >= 1".into(),
                    ));
                }
                let q = 1.0 / mean;
                let mut pmf = vec![0.0; *cap as usize + 1];
                pmf[0] = 1.0 - prob;
                let mut survive = 1.0;
                for k in 1..*cap as usize {
                    pmf[k] = prob * survive * q;
                    survive *= 1.0 - q;
                }
                pmf[*cap as usize] = prob * survive;
                pmf
            }
            DelayDistribution::Discrete(p) => p.clone(),
        };
        let mass: f64 = pmf.iter().sum();
        if pmf.iter().any(|&p| !(p >= 0.0)) || libm::fabs(mass - 1.0) > 1e-9 {
            return Err(Error::UnnormalizedDistribution(mass));
        }
        Ok(pmf)
    }

    pub fn is_zero(&self) -> bool {
        self.pmf().map(|p| p[0] >= 1.0).unwrap_or(false)
    }
}

/// Cumulative table for inverse-transform sampling.
#[derive(Debug, Clone)]
struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    fn new(dist: &DelayDistribution) -> Result<Self> {
        let mut acc = 0.0;
        let cdf = dist
            .pmf()?
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Sampler { cdf })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Minutes {
        let u: f64 = rng.random();
        self.cdf.iter().position(|&c| u < c).unwrap_or(self.cdf.len() - 1) as Minutes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessConfig {
    /// RT-1: delay at the start of each vehicle tour.
    pub rt1_start_delay: Minutes,
    /// RT-2: extra drive time on one network edge for the whole day.
    pub rt2_extra: Minutes,
    /// RT-3: blocking duration of one station.
    pub rt3_block: Minutes,
    /// RT-3: window start relative to the station's first scheduled departure.
    pub rt3_anchor_offset: Minutes,
    pub rt4_replications: u32,
    pub rt4_drive_delays: DelayDistribution,
    pub rt4_trip_start_delays: DelayDistribution,
    pub master_seed: u64,
    pub weights: UtilityWeights,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            rt1_start_delay: 5,
            rt2_extra: 2,
            rt3_block: 15,
            rt3_anchor_offset: 0,
            rt4_replications: 10,
            rt4_drive_delays: DelayDistribution::Geometric { prob: 0.1, mean: 2.0, cap: 15 },
            rt4_trip_start_delays: DelayDistribution::Geometric { prob: 0.2, mean: 3.0, cap: 20 },
            master_seed: 0,
            weights: UtilityWeights::default(),
        }
    }
}

impl RobustnessConfig {
    /// All tests switched off: every raw value is zero.
    pub fn zero() -> Self {
        RobustnessConfig {
            rt1_start_delay: 0,
            rt2_extra: 0,
            rt3_block: 0,
            rt4_drive_delays: DelayDistribution::Zero,
            rt4_trip_start_delays: DelayDistribution::Zero,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rt1_start_delay < 0 || self.rt2_extra < 0 || self.rt3_block < 0 {
            return Err(Error::InvalidConfig("robustness parameters must be >= 0".into()));
        }
        if self.weights.transfer_penalty < 0 || self.weights.stranding_penalty < 0 {
            return Err(Error::InvalidConfig("utility weights must be >= 0".into()));
        }
        self.rt4_drive_delays.pmf()?;
        self.rt4_trip_start_delays.pmf()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RobustnessTest {
    Rt1,
    Rt2,
    Rt3,
    Rt4,
}

impl RobustnessTest {
    pub const ALL: [RobustnessTest; 4] =
        [RobustnessTest::Rt1, RobustnessTest::Rt2, RobustnessTest::Rt3, RobustnessTest::Rt4];
}

/// Aggregate delay of one simulation. `index` is the vehicle tour, edge,
/// station or replication the simulation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationRecord {
    pub test: RobustnessTest,
    pub index: usize,
    pub aggregate: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub raw: [f64; 4],
    pub breakdown: Vec<SimulationRecord>,
}

fn run_all<F>(count: usize, scenario: F, instance: &Instance, weights: &UtilityWeights) -> Result<Vec<u64>>
where
    F: Fn(usize) -> Option<DelayScenario> + Sync + Send,
{
    map_indexed(count, |i| match scenario(i) {
        Some(s) => simulate(instance, &s, weights).map(|o| o.aggregate),
        None => Ok(0),
    })
    .into_iter()
    .collect()
}

/// Per-tour aggregates of RT-1.
pub fn rt1_simulations(instance: &Instance, config: &RobustnessConfig) -> Result<Vec<u64>> {
    let starts: Vec<usize> = instance.tour_starts().collect();
    if config.rt1_start_delay == 0 {
        return Ok(vec![0; starts.len()]);
    }
    run_all(
        starts.len(),
        |i| {
            Some(DelayScenario {
                source_delays: vec![(starts[i], config.rt1_start_delay)],
                ..Default::default()
            })
        },
        instance,
        &config.weights,
    )
}

pub fn rt1(instance: &Instance, config: &RobustnessConfig) -> Result<f64> {
    Ok(rt1_simulations(instance, config)?.iter().sum::<u64>() as f64)
}

/// Per-edge aggregates of RT-2.
pub fn rt2_simulations(instance: &Instance, config: &RobustnessConfig) -> Result<Vec<u64>> {
    let m = instance.dataset.edge_count();
    if config.rt2_extra == 0 {
        return Ok(vec![0; m]);
    }
    run_all(
        m,
        |edge| {
            (!instance.drives_on_edge(edge).is_empty()).then(|| DelayScenario {
                edge_slowdowns: vec![EdgeSlowdown {
                    edge,
                    extra: config.rt2_extra,
                    start: 0,
                    end: Minutes::MAX,
                }],
                ..Default::default()
            })
        },
        instance,
        &config.weights,
    )
}

pub fn rt2(instance: &Instance, config: &RobustnessConfig) -> Result<f64> {
    Ok(rt2_simulations(instance, config)?.iter().sum::<u64>() as f64)
}

/// Per-station aggregates of RT-3. The blocking window of a station starts
/// at its first scheduled departure plus the configured offset.
pub fn rt3_simulations(instance: &Instance, config: &RobustnessConfig) -> Result<Vec<u64>> {
    let n = instance.dataset.station_count();
    if config.rt3_block == 0 {
        return Ok(vec![0; n]);
    }
    let times = &instance.timetable.times;
    run_all(
        n,
        |station| {
            let first = instance.departures_at(station).iter().map(|&e| times[e]).min()?;
            Some(DelayScenario {
                station_blockings: vec![StationBlocking {
                    station,
                    start: (first + config.rt3_anchor_offset).max(0),
                    duration: config.rt3_block,
                }],
                ..Default::default()
            })
        },
        instance,
        &config.weights,
    )
}

pub fn rt3(instance: &Instance, config: &RobustnessConfig) -> Result<f64> {
    Ok(rt3_simulations(instance, config)?.iter().sum::<u64>() as f64)
}

/// The scenario of RT-4 replication `r`: every drive activity, then every
/// trip start, draws one delay in id order from a generator seeded with
/// `mix(master_seed, r)`.
pub fn rt4_scenario(instance: &Instance, config: &RobustnessConfig, r: u32) -> Result<DelayScenario> {
    let drive = Sampler::new(&config.rt4_drive_delays)?;
    let start = Sampler::new(&config.rt4_trip_start_delays)?;
    let seed = mix(config.master_seed, u64::from(r));
    let mut rng = rng_from_seed(seed);
    let mut scenario = DelayScenario { seed, ..Default::default() };
    for a in instance.network.activities_of(ActivityKind::Drive) {
        let d = drive.sample(&mut rng);
        if d > 0 {
            scenario.activity_delays.push((a.id, d));
        }
    }
    for trip in &instance.network.trips {
        let d = start.sample(&mut rng);
        if d > 0 {
            scenario.source_delays.push((trip.id, d));
        }
    }
    Ok(scenario)
}

/// Per-replication aggregates of RT-4.
pub fn rt4_simulations(instance: &Instance, config: &RobustnessConfig) -> Result<Vec<u64>> {
    config.rt4_drive_delays.pmf()?;
    config.rt4_trip_start_delays.pmf()?;
    let results: Vec<Result<u64>> = map_indexed(config.rt4_replications as usize, |r| {
        let s = rt4_scenario(instance, config, r as u32)?;
        if s.is_empty() {
            return Ok(0);
        }
        simulate(instance, &s, &config.weights).map(|o| o.aggregate)
    });
    results.into_iter().collect()
}

pub fn rt4(instance: &Instance, config: &RobustnessConfig) -> Result<f64> {
    let sims = rt4_simulations(instance, config)?;
    if sims.is_empty() {
        return Ok(0.0);
    }
    Ok(sims.iter().sum::<u64>() as f64 / sims.len() as f64)
}

/// Runs all four tests.
pub fn evaluate(instance: &Instance, config: &RobustnessConfig) -> Result<RobustnessReport> {
    config.validate()?;
    if !instance.has_routes() {
        return Err(Error::MissingRoutes);
    }
    let per_test = [
        rt1_simulations(instance, config)?,
        rt2_simulations(instance, config)?,
        rt3_simulations(instance, config)?,
        rt4_simulations(instance, config)?,
    ];
    let mut raw = [0.0; 4];
    let mut breakdown = Vec::new();
    for (t, sims) in per_test.iter().enumerate() {
        let total = sims.iter().sum::<u64>() as f64;
        raw[t] = if t == 3 && !sims.is_empty() { total / sims.len() as f64 } else { total };
        breakdown.extend(sims.iter().enumerate().map(|(index, &aggregate)| SimulationRecord {
            test: RobustnessTest::ALL[t],
            index,
            aggregate,
        }));
    }
    Ok(RobustnessReport { raw, breakdown })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub values: Vec<[f64; 4]>,
    /// Column maxima used as the 100 mark.
    pub reference: [f64; 4],
    /// Tests whose raw column is all zero; their normalized values are 0.
    pub zero_columns: Vec<RobustnessTest>,
}

/// Scales every test so the worst instance scores 100.
pub fn normalize(raw: &[[f64; 4]]) -> Result<Normalized> {
    if raw.is_empty() {
        return Err(Error::Empty("raw robustness values"));
    }
    let mut reference = [0.0f64; 4];
    for row in raw {
        for t in 0..4 {
            if !(row[t] >= 0.0) {
                return Err(Error::InvalidConfig("raw robustness values must be >= 0".into()));
            }
            reference[t] = reference[t].max(row[t]);
        }
    }
    let zero_columns =
        (0..4).filter(|&t| reference[t] == 0.0).map(|t| RobustnessTest::ALL[t]).collect();
    Ok(Normalized { values: normalize_against(raw, &reference), reference, zero_columns })
}

/// Scales raw values by a fixed reference (e.g. the maxima of a training
/// corpus). Values may exceed 100 for instances worse than the reference.
pub fn normalize_against(raw: &[[f64; 4]], reference: &[f64; 4]) -> Vec<[f64; 4]> {
    raw.iter()
        .map(|row| {
            let mut out = [0.0; 4];
            for t in 0..4 {
                if reference[t] > 0.0 {
                    // ratio first, so the reference row maps to exactly 100
                    out[t] = row[t] / reference[t] * 100.0;
                }
            }
            out
        })
        .collect()
}
