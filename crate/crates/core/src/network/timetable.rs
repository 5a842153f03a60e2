use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::ean::{Activity, ActivityId, ActivityKind, Event, EventActivityNetwork, EventId, Trip};
use crate::{Error, Minutes, Result};

/// Event times modulo the period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicTimetable {
    pub period: Minutes,
    pub times: BTreeMap<EventId, Minutes>,
}

impl PeriodicTimetable {
    pub fn new(period: Minutes, times: BTreeMap<EventId, Minutes>) -> Self {
        PeriodicTimetable { period, times }
    }

    pub fn time(&self, e: EventId) -> Option<Minutes> {
        self.times.get(&e).copied()
    }
}

/// Absolute event times in minutes from the start of the day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AperiodicTimetable {
    /// Number of rolled-out periods.
    pub horizon: u32,
    pub period: Minutes,
    pub times: Vec<Minutes>,
}

impl AperiodicTimetable {
    pub fn time(&self, e: EventId) -> Minutes {
        self.times[e]
    }

    /// End of the operating day; event shifts past this point are truncated.
    pub fn day_end(&self) -> Minutes {
        Minutes::from(self.horizon + 1) * self.period
            + self.times.iter().copied().max().unwrap_or(0).max(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicViolation {
    pub activity: ActivityId,
    pub slack: Minutes,
}

/// `(pi_j - pi_i - L) mod T`.
pub fn periodic_slack(activity: &Activity, timetable: &PeriodicTimetable) -> Result<Minutes> {
    let ti = timetable
        .time(activity.tail)
        .ok_or(Error::MissingEventTimes(vec![activity.tail]))?;
    let tj = timetable
        .time(activity.head)
        .ok_or(Error::MissingEventTimes(vec![activity.head]))?;
    Ok((tj - ti - activity.lower).rem_euclid(timetable.period))
}

/// `time(j) - time(i) - L`; negative when the lower bound is violated.
pub fn aperiodic_slack(activity: &Activity, timetable: &AperiodicTimetable) -> Minutes {
    timetable.times[activity.head] - timetable.times[activity.tail] - activity.lower
}

/// Activities whose modular slack exceeds `U - L`. Activities with an
/// unbounded upper limit are always satisfied.
pub fn validate_periodic(
    timetable: &PeriodicTimetable,
    network: &EventActivityNetwork,
) -> Result<Vec<PeriodicViolation>> {
    let missing: Vec<EventId> = network
        .events
        .iter()
        .map(|e| e.id)
        .filter(|id| !timetable.times.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingEventTimes(missing));
    }
    let mut violations = Vec::new();
    for a in &network.activities {
        let slack = periodic_slack(a, timetable)?;
        if let Some(upper) = a.upper {
            if slack > upper - a.lower {
                violations.push(PeriodicViolation { activity: a.id, slack });
            }
        }
    }
    Ok(violations)
}

/// Repeats a feasible periodic plan over `horizon` periods.
///
/// Trip copy `k` starts at `pi(first departure) + k*T`; every drive and wait
/// activity keeps its periodic duration `L + slack`, so the head of an
/// activity is the copy realizing the smallest feasible duration. Transfers
/// are instantiated the same way and dropped when the target copy does not
/// exist within the rolled-out day.
pub fn roll_out(
    network: &EventActivityNetwork,
    timetable: &PeriodicTimetable,
    horizon: u32,
) -> Result<(EventActivityNetwork, AperiodicTimetable)> {
    if horizon == 0 {
        return Err(Error::InvalidConfig("roll-out horizon must be at least 1".into()));
    }
    if let Some(v) = validate_periodic(timetable, network)?.first() {
        return Err(Error::InfeasiblePeriodic { activity: v.activity, slack: v.slack });
    }
    let period = timetable.period;
    let along_trip = |from: EventId, to: EventId| -> &Activity {
        network
            .outgoing(from)
            .iter()
            .map(|&a| &network.activities[a])
            .find(|a| a.head == to && a.kind != ActivityKind::Transfer)
            .expect("consecutive trip events are joined by a drive or wait")
    };

    let mut events = Vec::new();
    let mut activities: Vec<Activity> = Vec::new();
    let mut trips = Vec::new();
    let mut times = Vec::new();
    let mut copies: Vec<Vec<EventId>> = vec![Vec::new(); network.events.len()];
    let mut at_time: BTreeMap<(EventId, Minutes), EventId> = BTreeMap::new();

    for k in 0..horizon {
        for ptrip in &network.trips {
            let trip = trips.len();
            let mut trip_events = Vec::with_capacity(ptrip.events.len());
            let mut t = timetable.time(ptrip.first_departure()).unwrap().rem_euclid(period)
                + Minutes::from(k) * period;
            for (idx, &pe) in ptrip.events.iter().enumerate() {
                if idx > 0 {
                    let prev = ptrip.events[idx - 1];
                    let act = along_trip(prev, pe);
                    t += act.lower + periodic_slack(act, timetable)?;
                    activities.push(Activity {
                        id: activities.len(),
                        kind: act.kind,
                        tail: *trip_events.last().unwrap(),
                        head: events.len(),
                        lower: act.lower,
                        upper: act.upper,
                        passenger_load: 0,
                    });
                }
                let id = events.len();
                let parent = &network.events[pe];
                events.push(Event {
                    id,
                    kind: parent.kind,
                    station: parent.station,
                    line: parent.line,
                    trip,
                    periodic_parent: Some(pe),
                });
                times.push(t);
                copies[pe].push(id);
                at_time.insert((pe, t), id);
                trip_events.push(id);
            }
            trips.push(Trip {
                id: trip,
                line: ptrip.line,
                direction: ptrip.direction,
                events: trip_events,
            });
        }
    }

    for pa in network.activities_of(ActivityKind::Transfer) {
        let duration = pa.lower + periodic_slack(pa, timetable)?;
        for &tail in &copies[pa.tail] {
            if let Some(&head) = at_time.get(&(pa.head, times[tail] + duration)) {
                activities.push(Activity {
                    id: activities.len(),
                    kind: ActivityKind::Transfer,
                    tail,
                    head,
                    lower: pa.lower,
                    upper: pa.upper,
                    passenger_load: 0,
                });
            }
        }
    }

    let network = EventActivityNetwork::from_parts(events, activities, trips)?;
    Ok((network, AperiodicTimetable { horizon, period, times }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ean::{Direction, EventKind};
    use proptest::prelude::*;

    fn two_event_network(lower: Minutes, upper: Minutes) -> EventActivityNetwork {
        let events = vec![
            Event { id: 0, kind: EventKind::Departure, station: 0, line: 0, trip: 0, periodic_parent: None },
            Event { id: 1, kind: EventKind::Arrival, station: 1, line: 0, trip: 0, periodic_parent: None },
        ];
        let trips = vec![Trip { id: 0, line: 0, direction: Direction::Forward, events: vec![0, 1] }];
        let acts = vec![Activity {
            id: 0,
            kind: ActivityKind::Drive,
            tail: 0,
            head: 1,
            lower,
            upper: Some(upper),
            passenger_load: 0,
        }];
        EventActivityNetwork::from_parts(events, acts, trips).unwrap()
    }

    fn tt(pi_i: Minutes, pi_j: Minutes) -> PeriodicTimetable {
        PeriodicTimetable::new(60, [(0, pi_i), (1, pi_j)].into_iter().collect())
    }

    #[test]
    fn lower_bound_case_is_feasible() {
        let n = two_event_network(10, 12);
        let t = tt(0, 10);
        assert!(validate_periodic(&t, &n).unwrap().is_empty());
        assert_eq!(periodic_slack(&n.activities[0], &t).unwrap(), 0);
    }

    #[test]
    fn wrapping_case_has_slack_two() {
        let n = two_event_network(10, 12);
        let t = tt(55, 7);
        assert!(validate_periodic(&t, &n).unwrap().is_empty());
        assert_eq!(periodic_slack(&n.activities[0], &t).unwrap(), 2);
    }

    #[test]
    fn too_long_is_a_violation() {
        let n = two_event_network(10, 12);
        let v = validate_periodic(&tt(0, 25), &n).unwrap();
        // (25 - 0 - 10) mod 60 = 15 > U - L = 2
        assert_eq!(v, vec![PeriodicViolation { activity: 0, slack: 15 }]);
    }

    #[test]
    fn missing_times_are_listed() {
        let n = two_event_network(10, 12);
        let t = PeriodicTimetable::new(60, [(0, 0)].into_iter().collect());
        assert_eq!(validate_periodic(&t, &n), Err(Error::MissingEventTimes(vec![1])));
    }

    #[test]
    fn aperiodic_slack_examples() {
        let n = two_event_network(10, 12);
        let a = AperiodicTimetable { horizon: 1, period: 60, times: vec![0, 10] };
        assert_eq!(aperiodic_slack(&n.activities[0], &a), 0);
        let a = AperiodicTimetable { horizon: 1, period: 60, times: vec![0, 12] };
        assert_eq!(aperiodic_slack(&n.activities[0], &a), 2);
    }

    #[test]
    fn roll_out_copies_and_wraps() {
        let n = two_event_network(10, 12);
        let (ap, times) = roll_out(&n, &tt(15, 25), 3).unwrap();
        let deps: Vec<_> = ap
            .events
            .iter()
            .filter(|e| e.periodic_parent == Some(0))
            .map(|e| times.times[e.id])
            .collect();
        assert_eq!(deps, vec![15, 75, 135]);

        // tail at 55, slack 2: head lands in the next period at 67
        let (_, times) = roll_out(&n, &tt(55, 7), 1).unwrap();
        assert_eq!(times.times, vec![55, 67]);
    }

    #[test]
    fn roll_out_refuses_infeasible() {
        let n = two_event_network(10, 12);
        assert!(matches!(
            roll_out(&n, &tt(0, 25), 2),
            Err(Error::InfeasiblePeriodic { activity: 0, slack: 15 })
        ));
    }

    proptest! {
        #[test]
        fn feasibility_is_shift_invariant(pi_i in 0i64..60, slack in 0i64..3, c in 0i64..60) {
            let n = two_event_network(10, 12);
            let base = tt(pi_i, (pi_i + 10 + slack).rem_euclid(60));
            prop_assert!(validate_periodic(&base, &n).unwrap().is_empty());
            let shifted = tt((pi_i + c).rem_euclid(60), (pi_i + 10 + slack + c).rem_euclid(60));
            prop_assert!(validate_periodic(&shifted, &n).unwrap().is_empty());
        }
    }
}
