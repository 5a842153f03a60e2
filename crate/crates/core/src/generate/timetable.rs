//! Constructive periodic timetables.
//!
//! Transfers span a whole period, so feasibility only concerns drive and
//! wait activities; every trip is laid out from a line offset by adding
//! `L + slack` per activity.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::network::{ActivityKind, Dataset, EventActivityNetwork, PeriodicTimetable};
use crate::rng::{mix, rng_from_seed};
use crate::{Error, Minutes, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimetableStrategy {
    /// Every drive and wait at its lower bound.
    EarliestFeasible,
    /// `budget` minutes spread one at a time over uniformly drawn activities
    /// that still have room below their upper bound.
    RandomSlack(u32),
    /// `b` minutes on every activity, capped by its upper bound.
    UniformBuffer(Minutes),
}

impl TimetableStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TimetableStrategy::UniformBuffer(b) if b < 0 => {
                Err(Error::InvalidConfig("buffer must be >= 0".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Periodic timetable for the periodic network of `dataset`.
///
/// Trip offsets come from `offset_seed`: each line direction gets a uniform
/// offset and its frequency slots are spaced `T / f` apart. Random slack
/// comes from `slack_seed`, so one set of offsets can carry many buffers.
pub fn gen_timetable(
    dataset: &Dataset,
    network: &EventActivityNetwork,
    strategy: TimetableStrategy,
    offset_seed: u64,
    slack_seed: u64,
) -> Result<PeriodicTimetable> {
    strategy.validate()?;
    let period = dataset.params.period;
    let mut slack = vec![0 as Minutes; network.activities.len()];
    let room = |a: usize| -> Minutes {
        let act = &network.activities[a];
        act.upper.map_or(Minutes::MAX, |u| u - act.lower)
    };
    let vehicle: Vec<usize> = network
        .activities
        .iter()
        .filter(|a| matches!(a.kind, ActivityKind::Drive | ActivityKind::Wait))
        .map(|a| a.id)
        .collect();
    match strategy {
        TimetableStrategy::EarliestFeasible => {}
        TimetableStrategy::UniformBuffer(b) => {
            for &a in &vehicle {
                slack[a] = b.min(room(a));
            }
        }
        TimetableStrategy::RandomSlack(budget) => {
            let mut rng = rng_from_seed(mix(slack_seed, 1));
            let mut open: Vec<usize> = vehicle.iter().copied().filter(|&a| room(a) > 0).collect();
            for _ in 0..budget {
                if open.is_empty() {
                    break;
                }
                let i = rng.random_range(0..open.len());
                let a = open[i];
                slack[a] += 1;
                if slack[a] >= room(a) {
                    open.swap_remove(i);
                }
            }
        }
    }

    let mut rng = rng_from_seed(mix(offset_seed, 0));
    let mut line_offset = BTreeMap::new();
    let mut times = BTreeMap::new();
    let mut slot = BTreeMap::new();
    for trip in &network.trips {
        let line = &dataset.lines[trip.line];
        let base = *line_offset
            .entry((trip.line, trip.direction))
            .or_insert_with(|| rng.random_range(0..period));
        let k = slot.entry((trip.line, trip.direction)).or_insert(0);
        let mut t = base + *k * (period / Minutes::from(line.frequency));
        *k += 1;
        for (i, &e) in trip.events.iter().enumerate() {
            if i > 0 {
                let prev = trip.events[i - 1];
                let a = network
                    .outgoing(prev)
                    .iter()
                    .copied()
                    .find(|&a| network.activities[a].head == e)
                    .expect("trip events are consecutive");
                t += network.activities[a].lower + slack[a];
            }
            times.insert(e, t.rem_euclid(period));
        }
    }
    Ok(PeriodicTimetable::new(period, times))
}
