//! Surrogate-guided local search over slack injections.
//!
//! Each iteration looks at the `N` tightest activities of every kind,
//! retimes the timetable by pushing one of them later, scores every
//! candidate with a robustness oracle and moves to the best strictly
//! improving one that keeps total perceived travel time within budget.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::features::{extract_with_times, FeatureCaps, FeatureLayout};
use crate::network::{ActivityId, ActivityKind, EventId};
use crate::par::map_indexed;
use crate::robustness::{evaluate, normalize_against, RobustnessConfig};
use crate::simulation::UtilityWeights;
use crate::surrogate::MlpModel;
use crate::{Error, Instance, Minutes, Result};

/// Maps an instance (and its feature vector) to four robustness estimates.
pub trait RobustnessOracle: Sync {
    /// Required feature vector length, if the oracle reads features.
    fn input_len(&self) -> Option<usize>;
    fn estimate(&self, instance: &Instance, times: &[Minutes], features: &[f64]) -> Result<[f64; 4]>;
}

impl RobustnessOracle for MlpModel {
    fn input_len(&self) -> Option<usize> {
        Some(self.inputs())
    }

    fn estimate(&self, _: &Instance, _: &[Minutes], features: &[f64]) -> Result<[f64; 4]> {
        let out = self.predict(features)?;
        let mut v = [0.0; 4];
        for (d, s) in v.iter_mut().zip(&out) {
            *d = *s;
        }
        Ok(v)
    }
}

/// Oracle backed by a closure over the feature vector.
#[derive(Debug)]
pub struct FeatureOracle<F>(pub F);

impl<F: Fn(&[f64]) -> [f64; 4] + Sync> RobustnessOracle for FeatureOracle<F> {
    fn input_len(&self) -> Option<usize> {
        None
    }

    fn estimate(&self, _: &Instance, _: &[Minutes], features: &[f64]) -> Result<[f64; 4]> {
        Ok((self.0)(features))
    }
}

/// Oracle backed by a closure over the retimed instance.
#[derive(Debug)]
pub struct InstanceOracle<F>(pub F);

impl<F: Fn(&Instance, &[Minutes]) -> Result<[f64; 4]> + Sync> RobustnessOracle for InstanceOracle<F> {
    fn input_len(&self) -> Option<usize> {
        None
    }

    fn estimate(&self, instance: &Instance, times: &[Minutes], _: &[f64]) -> Result<[f64; 4]> {
        (self.0)(instance, times)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Candidates per activity kind.
    pub per_kind: usize,
    /// Minutes of slack added per move.
    pub delta: Minutes,
    /// Replan passenger routes after every this many iterations.
    pub reroute_every: usize,
    /// Allowed relative growth of total perceived travel time.
    pub utility_budget: f64,
    pub max_iterations: usize,
    /// Weights of the four estimates in the objective.
    pub objective: [f64; 4],
    pub caps: FeatureCaps,
    pub weights: UtilityWeights,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            per_kind: 20,
            delta: 1,
            reroute_every: 10,
            utility_budget: 0.10,
            max_iterations: 100,
            objective: [1.0; 4],
            caps: FeatureCaps::default(),
            weights: UtilityWeights::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.per_kind == 0 || self.delta < 1 || self.reroute_every == 0 {
            return Err(Error::InvalidConfig("need N >= 1, delta >= 1, reroute interval >= 1".into()));
        }
        if !(self.utility_budget >= 0.0) {
            return Err(Error::InvalidConfig("utility budget must be >= 0".into()));
        }
        self.caps.validate()
    }

    pub fn score(&self, estimate: &[f64; 4]) -> f64 {
        estimate.iter().zip(&self.objective).map(|(e, w)| e * w).sum()
    }
}

/// The `n` activities of each kind with the smallest slack per passenger
/// (plain slack for turnarounds), grouped by kind in the order drive, wait,
/// transfer, turnaround. Ties go to the lower activity id.
pub fn build_neighborhood(instance: &Instance, n: usize) -> Vec<ActivityId> {
    let times = &instance.timetable.times;
    let mut out = Vec::with_capacity(4 * n);
    for kind in ActivityKind::ALL {
        let mut keyed: Vec<(i128, i128, ActivityId)> = instance
            .network
            .activities_of(kind)
            .map(|a| {
                let slack = i128::from(times[a.head] - times[a.tail] - a.lower);
                let load = match kind {
                    ActivityKind::Turnaround => 1,
                    _ => i128::from(a.passenger_load.max(1)),
                };
                (slack, load, a.id)
            })
            .collect();
        keyed.sort_by(|a, b| match (a.0 * b.1).cmp(&(b.0 * a.1)) {
            Ordering::Equal => a.2.cmp(&b.2),
            o => o,
        });
        out.extend(keyed.iter().take(n).map(|k| k.2));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    pub times: Vec<Minutes>,
    /// Events that moved, in the order they were pushed.
    pub shifted: Vec<EventId>,
    /// Propagation would have pushed an event past the end of the day; such
    /// events stay at the day end and their successors are not pushed.
    pub truncated: bool,
}

/// Delays the head of `activity` by `delta` and pushes every successor whose
/// lower bound would be violated, until the downstream slack absorbs the
/// shift. Upper bounds are not enforced.
pub fn inject_slack(instance: &Instance, activity: ActivityId, delta: Minutes) -> Result<Injection> {
    let net = &instance.network;
    let a = net.activities.get(activity).ok_or(Error::UnknownId { kind: "activity", id: activity })?;
    let mut times = instance.timetable.times.clone();
    if delta <= 0 {
        return Ok(Injection { times, shifted: Vec::new(), truncated: false });
    }
    let end = instance.timetable.day_end();
    let mut truncated = false;
    let mut shifted = Vec::new();
    let mut queue = VecDeque::new();
    let mut set = |e: EventId, t: Minutes, times: &mut Vec<Minutes>, queue: &mut VecDeque<EventId>| {
        if t > end {
            truncated = true;
            if times[e] < end {
                times[e] = end;
                shifted.push(e);
            }
            return;
        }
        times[e] = t;
        shifted.push(e);
        queue.push_back(e);
    };
    set(a.head, times[a.head] + delta, &mut times, &mut queue);
    while let Some(e) = queue.pop_front() {
        for &o in net.outgoing(e) {
            let act = &net.activities[o];
            let earliest = times[e] + act.lower;
            if times[act.head] < earliest {
                set(act.head, earliest, &mut times, &mut queue);
            }
        }
    }
    Ok(Injection { times, shifted, truncated })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub accepted: Option<ActivityId>,
    /// Objective of the current solution when the iteration began.
    pub value_before: f64,
    /// Objective of the accepted neighbor (equal to `value_before` if none).
    pub value_after: f64,
    /// Estimates of the current solution at the end of the iteration,
    /// after any rerouting.
    pub estimate: [f64; 4],
    pub utility: i64,
    pub rerouted: bool,
}

/// A solution visited by the search; iteration 0 is the start.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedSolution {
    pub iteration: usize,
    pub times: Vec<Minutes>,
    pub estimate: [f64; 4],
}

#[derive(Debug, Clone)]
pub struct SearchTrace {
    pub start_estimate: [f64; 4],
    pub start_utility: i64,
    pub records: Vec<IterationRecord>,
    pub solutions: Vec<AcceptedSolution>,
    /// Final solution with its last routes.
    pub solution: Instance,
}

impl SearchTrace {
    /// Every accepted step improved on the value it replaced.
    pub fn strictly_improving(&self) -> bool {
        self.records.iter().filter(|r| r.accepted.is_some()).all(|r| r.value_after < r.value_before)
    }
}

struct Scored {
    objective: f64,
    estimate: [f64; 4],
    times: Vec<Minutes>,
}

fn estimate_on<O: RobustnessOracle + ?Sized>(
    oracle: &O,
    instance: &Instance,
    times: &[Minutes],
    config: &SearchConfig,
) -> Result<[f64; 4]> {
    let f = extract_with_times(instance, times, &config.caps, &config.weights)?;
    oracle.estimate(instance, times, &f)
}

/// Hill climbing from `start`. Passenger routes are held fixed between
/// reroutings; the search never backtracks after a rerouting worsens the
/// current estimate.
pub fn local_search<O: RobustnessOracle + ?Sized>(
    start: &Instance,
    oracle: &O,
    config: &SearchConfig,
) -> Result<SearchTrace> {
    config.validate()?;
    if let Some(k) = oracle.input_len() {
        let expected = FeatureLayout::for_instance(start, config.caps).len();
        if k != expected {
            return Err(Error::DimensionMismatch { expected, got: k });
        }
    }
    let mut current = start.clone();
    if !current.has_routes() {
        current.plan_routes(&config.weights);
    }
    let start_utility = current.total_perceived_time(&config.weights);
    let budget = (1.0 + config.utility_budget) * start_utility as f64;
    let mut estimate = estimate_on(oracle, &current, &current.timetable.times, config)?;
    let start_estimate = estimate;
    let mut solutions = vec![AcceptedSolution {
        iteration: 0,
        times: current.timetable.times.clone(),
        estimate,
    }];
    let mut records = Vec::new();

    for iteration in 1..=config.max_iterations {
        let before = config.score(&estimate);
        let candidates = build_neighborhood(&current, config.per_kind);
        let scored: Vec<Result<Option<Scored>>> = map_indexed(candidates.len(), |i| {
            let inj = inject_slack(&current, candidates[i], config.delta)?;
            if inj.truncated
                || current.total_perceived_time_with(&inj.times, &config.weights) as f64 > budget
            {
                return Ok(None);
            }
            let e = estimate_on(oracle, &current, &inj.times, config)?;
            Ok(Some(Scored { objective: config.score(&e), estimate: e, times: inj.times }))
        });
        let mut best: Option<(usize, Scored)> = None;
        for (i, s) in scored.into_iter().enumerate() {
            if let Some(s) = s? {
                if best.as_ref().is_none_or(|(_, b)| s.objective < b.objective) {
                    best = Some((i, s));
                }
            }
        }
        let Some((i, best)) = best.filter(|(_, b)| b.objective < before) else {
            records.push(IterationRecord {
                iteration,
                accepted: None,
                value_before: before,
                value_after: before,
                estimate,
                utility: current.total_perceived_time(&config.weights),
                rerouted: false,
            });
            break;
        };
        let mut timetable = current.timetable.clone();
        timetable.times = best.times;
        current.set_timetable(timetable);
        estimate = best.estimate;
        solutions.push(AcceptedSolution {
            iteration,
            times: current.timetable.times.clone(),
            estimate,
        });
        let rerouted = iteration % config.reroute_every == 0;
        if rerouted {
            current.plan_routes(&config.weights);
            estimate = estimate_on(oracle, &current, &current.timetable.times, config)?;
        }
        records.push(IterationRecord {
            iteration,
            accepted: Some(candidates[i]),
            value_before: before,
            value_after: best.objective,
            estimate,
            utility: current.total_perceived_time(&config.weights),
            rerouted,
        });
    }
    Ok(SearchTrace { start_estimate, start_utility, records, solutions, solution: current })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealRecord {
    pub iteration: usize,
    pub estimate: [f64; 4],
    pub real_raw: [f64; 4],
    /// Real values on the oracle's label scale (normalized against the
    /// reference when one is given, raw otherwise).
    pub real: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealSeries {
    pub records: Vec<RealRecord>,
    /// Relative reduction of the estimated and the real objective from the
    /// first to the last solution.
    pub estimated_improvement: f64,
    pub real_improvement: f64,
    /// Final estimated objective minus final real objective.
    pub final_gap: f64,
}

/// Runs the true robustness tests on every solution the search accepted,
/// each with freshly planned routes.
pub fn reevaluate_real(
    start: &Instance,
    trace: &SearchTrace,
    robustness: &RobustnessConfig,
    reference: Option<&[f64; 4]>,
    objective: &[f64; 4],
) -> Result<RealSeries> {
    let records: Vec<Result<RealRecord>> = map_indexed(trace.solutions.len(), |i| {
        let s = &trace.solutions[i];
        let mut inst = start.clone();
        let mut tt = inst.timetable.clone();
        tt.times = s.times.clone();
        inst.set_timetable(tt);
        inst.plan_routes(&robustness.weights);
        let raw = evaluate(&inst, robustness)?.raw;
        let real = match reference {
            Some(r) => normalize_against(&[raw], r)[0],
            None => raw,
        };
        Ok(RealRecord { iteration: s.iteration, estimate: s.estimate, real_raw: raw, real })
    });
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    let score = |v: &[f64; 4]| v.iter().zip(objective).map(|(a, w)| a * w).sum::<f64>();
    let improvement = |first: f64, last: f64| if first != 0.0 { 1.0 - last / first } else { 0.0 };
    let (first, last) = (records.first().ok_or(Error::Empty("trace"))?, records.last().unwrap());
    Ok(RealSeries {
        estimated_improvement: improvement(score(&first.estimate), score(&last.estimate)),
        real_improvement: improvement(score(&first.real), score(&last.real)),
        final_gap: score(&last.estimate) - score(&last.real),
        records,
    })
}
