//! Instance directories: the dataset files plus the rolled-out network
//! (`events.csv`, `activities.csv`, `trips.csv`), `timetable.csv`,
//! `tours.csv` and the planned `routes.csv`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use transit_robust_core::network::{
    Activity, ActivityKind, AperiodicTimetable, Dataset, Direction, Event, EventActivityNetwork, EventKind, Trip,
    VehicleSchedule,
};
use transit_robust_core::simulation::PassengerRoute;
use transit_robust_core::Instance;

use super::dataset::{read_dataset_with, write_dataset_files, ParamsFile};
use super::{join_ids, parse_ids, read_csv, write_csv};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct EventRow {
    id: usize,
    kind: String,
    station: usize,
    line: usize,
    trip: usize,
    periodic_parent: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct ActivityRow {
    id: usize,
    kind: String,
    tail: usize,
    head: usize,
    lower: i64,
    upper: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct TripRow {
    id: usize,
    line: usize,
    direction: String,
    event_sequence: String,
}

#[derive(Serialize, Deserialize)]
struct TimeRow {
    event_id: usize,
    time: i64,
}

#[derive(Serialize, Deserialize)]
struct TourRow {
    tour_id: usize,
    trip_sequence: String,
}

#[derive(Serialize, Deserialize)]
struct RouteRow {
    group_id: usize,
    activity_sequence: String,
}

fn activity_kind_name(k: ActivityKind) -> &'static str {
    match k {
        ActivityKind::Drive => "drive",
        ActivityKind::Wait => "wait",
        ActivityKind::Transfer => "transfer",
        ActivityKind::Turnaround => "turnaround",
    }
}

fn parse_activity_kind(path: &Path, s: &str) -> Result<ActivityKind> {
    ActivityKind::ALL
        .into_iter()
        .find(|&k| activity_kind_name(k) == s)
        .ok_or_else(|| Error::format(path, format!("unknown activity kind {s:?}")))
}

pub fn write_instance(dir: &Path, inst: &Instance) -> Result<()> {
    write_dataset_files(dir, &inst.dataset)?;
    ParamsFile::new(&inst.dataset.params, inst.schedule.depot).write(dir)?;
    write_network(dir, &inst.network)?;
    write_timetable(dir, &inst.timetable.times)?;
    let tours: Vec<TourRow> = inst
        .schedule
        .tours
        .iter()
        .enumerate()
        .map(|(tour_id, t)| TourRow { tour_id, trip_sequence: join_ids(t) })
        .collect();
    write_csv(&dir.join("tours.csv"), &["tour_id", "trip_sequence"], &tours)?;
    let routes: Vec<RouteRow> = inst
        .routes()
        .iter()
        .map(|r| RouteRow { group_id: r.group, activity_sequence: join_ids(&r.activities) })
        .collect();
    write_csv(&dir.join("routes.csv"), &["group_id", "activity_sequence"], &routes)
}

/// Rewrites only the timetable of an instance directory.
pub fn write_timetable(dir: &Path, times: &[i64]) -> Result<()> {
    let rows: Vec<TimeRow> = times.iter().enumerate().map(|(event_id, &time)| TimeRow { event_id, time }).collect();
    write_csv(&dir.join("timetable.csv"), &["event_id", "time"], &rows)
}

fn write_network(dir: &Path, n: &EventActivityNetwork) -> Result<()> {
    let events: Vec<EventRow> = n
        .events
        .iter()
        .map(|e| EventRow {
            id: e.id,
            kind: match e.kind {
                EventKind::Arrival => "arrival",
                EventKind::Departure => "departure",
            }
            .into(),
            station: e.station,
            line: e.line,
            trip: e.trip,
            periodic_parent: e.periodic_parent,
        })
        .collect();
    write_csv(&dir.join("events.csv"), &["id", "kind", "station", "line", "trip", "periodic_parent"], &events)?;
    let acts: Vec<ActivityRow> = n
        .activities
        .iter()
        .map(|a| ActivityRow {
            id: a.id,
            kind: activity_kind_name(a.kind).into(),
            tail: a.tail,
            head: a.head,
            lower: a.lower,
            upper: a.upper,
        })
        .collect();
    write_csv(&dir.join("activities.csv"), &["id", "kind", "tail", "head", "lower", "upper"], &acts)?;
    let trips: Vec<TripRow> = n
        .trips
        .iter()
        .map(|t| TripRow {
            id: t.id,
            line: t.line,
            direction: match t.direction {
                Direction::Forward => "forward",
                Direction::Backward => "backward",
            }
            .into(),
            event_sequence: join_ids(&t.events),
        })
        .collect();
    write_csv(&dir.join("trips.csv"), &["id", "line", "direction", "event_sequence"], &trips)
}

fn check_dense(path: &Path, ids: impl Iterator<Item = usize>) -> Result<()> {
    for (i, id) in ids.enumerate() {
        if i != id {
            return Err(Error::format(path, format!("row {i} has id {id}; ids must be 0, 1, 2, ...")));
        }
    }
    Ok(())
}

fn read_network(dir: &Path) -> Result<EventActivityNetwork> {
    let path = dir.join("events.csv");
    let rows = read_csv::<EventRow>(&path)?;
    check_dense(&path, rows.iter().map(|r| r.id))?;
    let events = rows
        .into_iter()
        .map(|r| {
            let kind = match r.kind.as_str() {
                "arrival" => EventKind::Arrival,
                "departure" => EventKind::Departure,
                other => return Err(Error::format(&path, format!("unknown event kind {other:?}"))),
            };
            Ok(Event { id: r.id, kind, station: r.station, line: r.line, trip: r.trip, periodic_parent: r.periodic_parent })
        })
        .collect::<Result<Vec<_>>>()?;

    let path = dir.join("activities.csv");
    let rows = read_csv::<ActivityRow>(&path)?;
    check_dense(&path, rows.iter().map(|r| r.id))?;
    let activities = rows
        .into_iter()
        .map(|r| {
            Ok(Activity {
                id: r.id,
                kind: parse_activity_kind(&path, &r.kind)?,
                tail: r.tail,
                head: r.head,
                lower: r.lower,
                upper: r.upper,
                passenger_load: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let path = dir.join("trips.csv");
    let rows = read_csv::<TripRow>(&path)?;
    check_dense(&path, rows.iter().map(|r| r.id))?;
    let trips = rows
        .into_iter()
        .map(|r| {
            let direction = match r.direction.as_str() {
                "forward" => Direction::Forward,
                "backward" => Direction::Backward,
                other => return Err(Error::format(&path, format!("unknown direction {other:?}"))),
            };
            Ok(Trip { id: r.id, line: r.line, direction, events: parse_ids(&path, &r.event_sequence)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EventActivityNetwork::from_parts(events, activities, trips)?)
}

pub fn read_timetable(dir: &Path, dataset: &Dataset, events: usize) -> Result<AperiodicTimetable> {
    let path = dir.join("timetable.csv");
    let mut times = vec![None; events];
    for r in read_csv::<TimeRow>(&path)? {
        let slot = times
            .get_mut(r.event_id)
            .ok_or_else(|| Error::format(&path, format!("unknown event {}", r.event_id)))?;
        *slot = Some(r.time);
    }
    let missing: Vec<usize> = (0..events).filter(|&e| times[e].is_none()).collect();
    if !missing.is_empty() {
        return Err(transit_robust_core::Error::MissingEventTimes(missing).into());
    }
    Ok(AperiodicTimetable {
        horizon: dataset.params.horizon,
        period: dataset.params.period,
        times: times.into_iter().map(Option::unwrap).collect(),
    })
}

/// Loads an instance; routes are installed when `routes.csv` is present.
pub fn read_instance(dir: &Path) -> Result<Instance> {
    let (dataset, params) = read_dataset_with(dir)?;
    let network = read_network(dir)?;
    let timetable = read_timetable(dir, &dataset, network.events.len())?;
    let path = dir.join("tours.csv");
    let mut tours = read_csv::<TourRow>(&path)?;
    check_dense(&path, tours.iter().map(|r| r.tour_id))?;
    let tours = tours
        .drain(..)
        .map(|r| parse_ids(&path, &r.trip_sequence))
        .collect::<Result<Vec<Vec<usize>>>>()?;
    let schedule = VehicleSchedule { tours, vehicle_capacity: dataset.params.vehicle_capacity, depot: params.depot };
    let mut inst = Instance::new(Arc::new(dataset), network, timetable, schedule)?;

    let path = dir.join("routes.csv");
    if path.exists() {
        let rows = read_csv::<RouteRow>(&path)?;
        check_dense(&path, rows.iter().map(|r| r.group_id))?;
        let routes = rows
            .into_iter()
            .map(|r| {
                let acts = parse_ids(&path, &r.activity_sequence)?;
                Ok(PassengerRoute::from_activities(r.group_id, acts, &inst.network, &inst.timetable.times)?)
            })
            .collect::<Result<Vec<_>>>()?;
        inst.set_routes(routes)?;
    }
    Ok(inst)
}
