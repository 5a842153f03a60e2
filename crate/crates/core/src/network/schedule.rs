use alloc::vec;
use alloc::vec::Vec;

use super::dataset::{Dataset, DeadheadTable, StationId};
use super::ean::{ActivityKind, EventActivityNetwork, TripId};
use super::timetable::AperiodicTimetable;
use crate::{Error, Minutes, Result};

/// Vehicle tours over the trips of an aperiodic network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VehicleSchedule {
    pub tours: Vec<Vec<TripId>>,
    pub vehicle_capacity: u32,
    /// When set, every tour must start and end at this station.
    pub depot: Option<StationId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    Uncovered(TripId),
    Repeated(TripId),
    TurnaroundTooShort { from_trip: TripId, to_trip: TripId, gap: Minutes, required: Minutes },
    Unreachable { from_trip: TripId, to_trip: TripId },
    Depot { tour: usize },
}

/// Minimal turnaround between a trip ending at `from` and one starting at
/// `to`: the dataset's turnaround time plus any empty drive.
pub(crate) fn required_turnaround(
    dataset: &Dataset,
    deadhead: &DeadheadTable,
    from: StationId,
    to: StationId,
) -> Option<Minutes> {
    deadhead.time(from, to).map(|d| dataset.params.min_turnaround + d)
}

pub fn validate_schedule(
    schedule: &VehicleSchedule,
    network: &EventActivityNetwork,
    timetable: &AperiodicTimetable,
    dataset: &Dataset,
) -> Result<Vec<ScheduleViolation>> {
    let trip_count = network.trips.len();
    if let Some(&bad) = schedule.tours.iter().flatten().find(|&&t| t >= trip_count) {
        return Err(Error::UnknownId { kind: "trip", id: bad });
    }
    let deadhead = DeadheadTable::new(dataset);
    let mut violations = Vec::new();
    let mut count = vec![0u32; trip_count];
    for &t in schedule.tours.iter().flatten() {
        count[t] += 1;
    }
    for (t, &c) in count.iter().enumerate() {
        match c {
            0 => violations.push(ScheduleViolation::Uncovered(t)),
            1 => {}
            _ => violations.push(ScheduleViolation::Repeated(t)),
        }
    }
    for (idx, tour) in schedule.tours.iter().enumerate() {
        for w in tour.windows(2) {
            let end = network.trips[w[0]].last_arrival();
            let start = network.trips[w[1]].first_departure();
            let from = network.events[end].station;
            let to = network.events[start].station;
            match required_turnaround(dataset, &deadhead, from, to) {
                None => violations
                    .push(ScheduleViolation::Unreachable { from_trip: w[0], to_trip: w[1] }),
                Some(required) => {
                    let gap = timetable.times[start] - timetable.times[end];
                    if gap < required {
                        violations.push(ScheduleViolation::TurnaroundTooShort {
                            from_trip: w[0],
                            to_trip: w[1],
                            gap,
                            required,
                        });
                    }
                }
            }
        }
        if let (Some(depot), Some(first), Some(last)) = (schedule.depot, tour.first(), tour.last())
        {
            let s = network.events[network.trips[*first].first_departure()].station;
            let e = network.events[network.trips[*last].last_arrival()].station;
            if s != depot || e != depot {
                violations.push(ScheduleViolation::Depot { tour: idx });
            }
        }
    }
    Ok(violations)
}

/// Replaces the network's turnaround activities by the ones induced by
/// `schedule`. Turnarounds have no upper bound.
pub fn attach_turnarounds(
    network: &mut EventActivityNetwork,
    schedule: &VehicleSchedule,
    dataset: &Dataset,
) -> Result<()> {
    if let Some(&bad) = schedule.tours.iter().flatten().find(|&&t| t >= network.trips.len()) {
        return Err(Error::UnknownId { kind: "trip", id: bad });
    }
    network.remove_activities_of(ActivityKind::Turnaround);
    let deadhead = DeadheadTable::new(dataset);
    for tour in &schedule.tours {
        for w in tour.windows(2) {
            let tail = network.trips[w[0]].last_arrival();
            let head = network.trips[w[1]].first_departure();
            let lower = required_turnaround(
                dataset,
                &deadhead,
                network.events[tail].station,
                network.events[head].station,
            )
            .ok_or(Error::InvalidDataset(alloc::format!(
                "no deadhead path between trips {} and {}",
                w[0],
                w[1]
            )))?;
            network.push_activity(ActivityKind::Turnaround, tail, head, lower, None);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::dataset::tests::chain_dataset;
    use crate::network::ean::{Activity, Direction, Event, EventKind, Trip};

    /// Trip 0: S0 -> S1 ending at `end`; trip 1: S1 -> S0 starting at `start`.
    fn two_trips(end: Minutes, start: Minutes) -> (EventActivityNetwork, AperiodicTimetable) {
        let ev = |id, kind, station, trip| Event {
            id,
            kind,
            station,
            line: 0,
            trip,
            periodic_parent: None,
        };
        let events = vec![
            ev(0, EventKind::Departure, 0, 0),
            ev(1, EventKind::Arrival, 1, 0),
            ev(2, EventKind::Departure, 1, 1),
            ev(3, EventKind::Arrival, 0, 1),
        ];
        let drive = |id, tail, head| Activity {
            id,
            kind: ActivityKind::Drive,
            tail,
            head,
            lower: 10,
            upper: Some(12),
            passenger_load: 0,
        };
        let trips = vec![
            Trip { id: 0, line: 0, direction: Direction::Forward, events: vec![0, 1] },
            Trip { id: 1, line: 0, direction: Direction::Backward, events: vec![2, 3] },
        ];
        let n = EventActivityNetwork::from_parts(events, vec![drive(0, 0, 1), drive(1, 2, 3)], trips)
            .unwrap();
        let tt = AperiodicTimetable {
            horizon: 1,
            period: 60,
            times: vec![end - 10, end, start, start + 10],
        };
        (n, tt)
    }

    fn schedule(tours: Vec<Vec<TripId>>) -> VehicleSchedule {
        VehicleSchedule { tours, vehicle_capacity: 100, depot: None }
    }

    #[test]
    fn single_trip_tour_is_valid() {
        let d = chain_dataset(vec![]);
        let (n, tt) = two_trips(100, 110);
        let v = validate_schedule(&schedule(vec![vec![0], vec![1]]), &n, &tt, &d).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn short_turnaround_is_reported() {
        let d = chain_dataset(vec![]);
        let (n, tt) = two_trips(100, 104);
        let v = validate_schedule(&schedule(vec![vec![0, 1]]), &n, &tt, &d).unwrap();
        assert_eq!(
            v,
            vec![ScheduleViolation::TurnaroundTooShort { from_trip: 0, to_trip: 1, gap: 4, required: 5 }]
        );
    }

    #[test]
    fn partition_violations() {
        let d = chain_dataset(vec![]);
        let (n, tt) = two_trips(100, 110);
        let v = validate_schedule(&schedule(vec![vec![0], vec![0]]), &n, &tt, &d).unwrap();
        assert!(v.contains(&ScheduleViolation::Repeated(0)));
        assert!(v.contains(&ScheduleViolation::Uncovered(1)));
        assert_eq!(
            validate_schedule(&schedule(vec![vec![5]]), &n, &tt, &d),
            Err(Error::UnknownId { kind: "trip", id: 5 })
        );
    }

    #[test]
    fn depot_rule() {
        let d = chain_dataset(vec![]);
        let (n, tt) = two_trips(100, 110);
        let mut s = schedule(vec![vec![0, 1]]);
        s.depot = Some(0);
        assert!(validate_schedule(&s, &n, &tt, &d).unwrap().is_empty());
        s.depot = Some(1);
        assert_eq!(
            validate_schedule(&s, &n, &tt, &d).unwrap(),
            vec![ScheduleViolation::Depot { tour: 0 }]
        );
    }

    #[test]
    fn attach_adds_turnaround() {
        let d = chain_dataset(vec![]);
        let (mut n, _) = two_trips(100, 110);
        attach_turnarounds(&mut n, &schedule(vec![vec![0, 1]]), &d).unwrap();
        let t: Vec<_> = n.activities_of(ActivityKind::Turnaround).collect();
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].tail, t[0].head, t[0].lower, t[0].upper), (1, 2, 5, None));
    }
}
