//! Hand-built instances for tests, examples and oracle comparisons.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::network::{
    attach_turnarounds, Activity, ActivityKind, AperiodicTimetable, Dataset, Direction, Event,
    EventActivityNetwork, EventKind, Line, LineId, NetworkEdge, PassengerGroup, PlanningParams,
    Station, StationId, TripId, VehicleSchedule,
};
use crate::simulation::UtilityWeights;
use crate::{Error, Instance, Minutes, Result};

/// One vehicle trip given by its stops and the alternating
/// departure/arrival times along them.
#[derive(Debug, Clone)]
pub struct TripSpec {
    pub line: LineId,
    pub stops: Vec<StationId>,
    /// `2 * (stops.len() - 1)` times: dep, arr, dep, arr, ...
    pub times: Vec<Minutes>,
}

/// Builds an aperiodic instance from explicit trips.
///
/// Drive bounds come from the dataset edges and wait bounds from its
/// parameters. A transfer is generated from every arrival to every departure
/// of a different line at the same station whose scheduled gap lies in
/// `[min_transfer, min_transfer + T - 1]`. Without `tours` every trip gets its
/// own vehicle. Routes are planned with `weights` unless it is `None`.
pub fn hand_instance(
    dataset: Dataset,
    trips: &[TripSpec],
    tours: Option<Vec<Vec<TripId>>>,
    weights: Option<&UtilityWeights>,
) -> Result<Instance> {
    let p = dataset.params.clone();
    let mut events = Vec::new();
    let mut activities: Vec<Activity> = Vec::new();
    let mut trip_list = Vec::new();
    let mut times = Vec::new();
    for (tid, spec) in trips.iter().enumerate() {
        if spec.stops.len() < 2 || spec.times.len() != 2 * (spec.stops.len() - 1) {
            return Err(Error::InvalidDataset(format!("trip {tid} has inconsistent stops/times")));
        }
        let mut trip_events = Vec::new();
        for (k, w) in spec.stops.windows(2).enumerate() {
            let edge = dataset
                .edge_between(w[0], w[1])
                .ok_or_else(|| Error::InvalidDataset(format!("trip {tid} leaves the network")))?;
            let edge = &dataset.edges[edge];
            let dep = events.len();
            for (kind, station) in [(EventKind::Departure, w[0]), (EventKind::Arrival, w[1])] {
                events.push(Event {
                    id: events.len(),
                    kind,
                    station,
                    line: spec.line,
                    trip: tid,
                    periodic_parent: None,
                });
            }
            times.push(spec.times[2 * k]);
            times.push(spec.times[2 * k + 1]);
            if k > 0 {
                activities.push(Activity {
                    id: activities.len(),
                    kind: ActivityKind::Wait,
                    tail: dep - 1,
                    head: dep,
                    lower: p.min_wait,
                    upper: Some(p.max_wait),
                    passenger_load: 0,
                });
            }
            activities.push(Activity {
                id: activities.len(),
                kind: ActivityKind::Drive,
                tail: dep,
                head: dep + 1,
                lower: edge.min_drive,
                upper: Some(edge.max_drive),
                passenger_load: 0,
            });
            trip_events.push(dep);
            trip_events.push(dep + 1);
        }
        trip_list.push(Trip {
            id: tid,
            line: spec.line,
            direction: Direction::Forward,
            events: trip_events,
        });
    }
    for a in &events {
        if a.kind != EventKind::Arrival {
            continue;
        }
        for d in &events {
            if d.kind == EventKind::Departure && d.station == a.station && d.line != a.line {
                let gap = times[d.id] - times[a.id];
                if gap >= p.min_transfer && gap <= p.min_transfer + p.period - 1 {
                    activities.push(Activity {
                        id: activities.len(),
                        kind: ActivityKind::Transfer,
                        tail: a.id,
                        head: d.id,
                        lower: p.min_transfer,
                        upper: Some(p.min_transfer + p.period - 1),
                        passenger_load: 0,
                    });
                }
            }
        }
    }
    let mut network = EventActivityNetwork::from_parts(events, activities, trip_list)?;
    let schedule = VehicleSchedule {
        tours: tours.unwrap_or_else(|| (0..trips.len()).map(|t| vec![t]).collect()),
        vehicle_capacity: p.vehicle_capacity,
        depot: None,
    };
    attach_turnarounds(&mut network, &schedule, &dataset)?;
    let timetable = AperiodicTimetable { horizon: p.horizon, period: p.period, times };
    let instance = Instance::new(Arc::new(dataset), network, timetable, schedule)?;
    if let Some(&a) = instance.lower_bound_violations().first() {
        return Err(Error::InvalidDataset(format!("activity {a} is shorter than its lower bound")));
    }
    Ok(match weights {
        Some(w) => instance.with_planned_routes(w),
        None => instance,
    })
}

use crate::network::Trip;

/// A straight line of stations operated by one trip.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub stations: usize,
    pub drive: Minutes,
    pub wait: Minutes,
    /// Slack per activity along the trip (drive, wait, drive, ...); missing
    /// entries are zero.
    pub slacks: Vec<Minutes>,
    pub start: Minutes,
    pub groups: Vec<PassengerGroup>,
    pub capacity: u32,
    pub route: bool,
}

impl ChainSpec {
    pub fn new(stations: usize) -> Self {
        ChainSpec {
            stations,
            drive: 10,
            wait: 1,
            slacks: Vec::new(),
            start: 0,
            groups: Vec::new(),
            capacity: 100,
            route: true,
        }
    }

    pub fn drive(mut self, drive: Minutes) -> Self {
        self.drive = drive;
        self
    }

    pub fn wait(mut self, wait: Minutes) -> Self {
        self.wait = wait;
        self
    }

    pub fn slacks(mut self, slacks: Vec<Minutes>) -> Self {
        self.slacks = slacks;
        self
    }

    pub fn start(mut self, start: Minutes) -> Self {
        self.start = start;
        self
    }

    pub fn groups(mut self, groups: Vec<PassengerGroup>) -> Self {
        self.groups = groups;
        self
    }

    pub fn capacity(mut self, capacity: u32) -> Self {
        self.capacity = capacity;
        self
    }

    pub fn unrouted(mut self) -> Self {
        self.route = false;
        self
    }
}

/// A chain dataset with `stations` stops, one line and a single trip whose
/// activity durations are their lower bound plus the given slack.
pub fn chain(spec: &ChainSpec) -> Instance {
    let n = spec.stations;
    let stations = (0..n).map(|i| Station { id: i, name: format!("S{i}") }).collect();
    let max_slack = spec.slacks.iter().copied().max().unwrap_or(0).max(3);
    let edges = (0..n - 1)
        .map(|i| NetworkEdge {
            id: i,
            from: i,
            to: i + 1,
            min_drive: spec.drive,
            max_drive: spec.drive + max_slack,
        })
        .collect();
    let lines = vec![Line { id: 0, station_path: (0..n).collect(), frequency: 1 }];
    let params = PlanningParams {
        min_wait: spec.wait,
        max_wait: spec.wait + max_slack,
        vehicle_capacity: spec.capacity,
        horizon: 1,
        ..PlanningParams::default()
    };
    let dataset = Dataset::new(stations, edges, lines, spec.groups.clone(), params)
        .expect("chain dataset is valid");
    let mut times = Vec::new();
    let mut t = spec.start;
    for k in 0..2 * (n - 1) {
        if k > 0 {
            let lower = if k % 2 == 1 { spec.drive } else { spec.wait };
            t += lower + spec.slacks.get(k - 1).copied().unwrap_or(0);
        }
        times.push(t);
    }
    let trip = TripSpec { line: 0, stops: (0..n).collect(), times };
    let weights = UtilityWeights::default();
    hand_instance(dataset, &[trip], None, spec.route.then_some(&weights))
        .expect("chain instance is valid")
}

/// `count` disjoint copies of a chain, each with its own stations, line,
/// vehicle and groups.
pub fn disjoint_chains(spec: &ChainSpec, count: usize) -> Instance {
    let n = spec.stations;
    let mut stations = Vec::new();
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    let mut groups = Vec::new();
    let mut trips = Vec::new();
    let max_slack = spec.slacks.iter().copied().max().unwrap_or(0).max(3);
    for c in 0..count {
        let base = c * n;
        for i in 0..n {
            stations.push(Station { id: base + i, name: format!("C{c}S{i}") });
        }
        for i in 0..n - 1 {
            edges.push(NetworkEdge {
                id: edges.len(),
                from: base + i,
                to: base + i + 1,
                min_drive: spec.drive,
                max_drive: spec.drive + max_slack,
            });
        }
        lines.push(Line { id: c, station_path: (base..base + n).collect(), frequency: 1 });
        for g in &spec.groups {
            groups.push(PassengerGroup {
                origin: base + g.origin,
                destination: base + g.destination,
                ..g.clone()
            });
        }
        let single = chain(&ChainSpec { groups: Vec::new(), ..spec.clone() });
        trips.push(TripSpec {
            line: c,
            stops: (base..base + n).collect(),
            times: single.timetable.times.clone(),
        });
    }
    let params = PlanningParams {
        min_wait: spec.wait,
        max_wait: spec.wait + max_slack,
        vehicle_capacity: spec.capacity,
        horizon: 1,
        ..PlanningParams::default()
    };
    let dataset = Dataset::new(stations, edges, lines, groups, params).expect("valid dataset");
    hand_instance(dataset, &trips, None, Some(&UtilityWeights::default()))
        .expect("disjoint chains are valid")
}
