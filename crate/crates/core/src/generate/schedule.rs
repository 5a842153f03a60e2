//! Greedy vehicle scheduling over rolled-out trips.

use alloc::vec;
use alloc::vec::Vec;

use crate::network::{AperiodicTimetable, Dataset, DeadheadTable, EventActivityNetwork, VehicleSchedule};
use crate::Minutes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleStrategy {
    /// Chain trips at the minimum turnaround.
    FirstFit,
    /// Chain only when the turnaround leaves at least `extra` minutes of
    /// slack; `u32::MAX` gives one vehicle per trip.
    BufferedTurnaround(u32),
}

/// Trips are taken by scheduled start (then id); each joins the first
/// existing tour, in creation order, whose last trip can reach it in time,
/// and opens a new tour otherwise.
pub fn gen_schedule(
    dataset: &Dataset,
    network: &EventActivityNetwork,
    timetable: &AperiodicTimetable,
    strategy: ScheduleStrategy,
) -> VehicleSchedule {
    let extra = match strategy {
        ScheduleStrategy::FirstFit => Some(0),
        ScheduleStrategy::BufferedTurnaround(u32::MAX) => None,
        ScheduleStrategy::BufferedTurnaround(x) => Some(Minutes::from(x)),
    };
    let times = &timetable.times;
    let mut order: Vec<usize> = (0..network.trips.len()).collect();
    order.sort_by_key(|&t| (times[network.trips[t].first_departure()], t));
    let deadhead = DeadheadTable::new(dataset);
    let mut tours: Vec<Vec<usize>> = Vec::new();
    // (end time, end station) of each tour
    let mut ends: Vec<(Minutes, usize)> = Vec::new();
    for t in order {
        let trip = &network.trips[t];
        let start = times[trip.first_departure()];
        let from = network.events[trip.first_departure()].station;
        let fits = |&(end, station): &(Minutes, usize)| {
            extra.is_some_and(|x| {
                deadhead
                    .time(station, from)
                    .is_some_and(|dh| end + dataset.params.min_turnaround + dh + x <= start)
            })
        };
        let end = (times[trip.last_arrival()], network.events[trip.last_arrival()].station);
        match ends.iter().position(fits) {
            Some(v) => {
                tours[v].push(t);
                ends[v] = end;
            }
            None => {
                tours.push(vec![t]);
                ends.push(end);
            }
        }
    }
    VehicleSchedule { tours, vehicle_capacity: dataset.params.vehicle_capacity, depot: None }
}
