use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::dataset::{Dataset, EdgeId, LineId, StationId};
use crate::{Error, Minutes, Result};

pub type EventId = usize;
pub type ActivityId = usize;
pub type TripId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Arrival,
    Departure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub id: EventId,
    pub kind: EventKind,
    pub station: StationId,
    pub line: LineId,
    pub trip: TripId,
    /// The periodic event this one was rolled out from.
    pub periodic_parent: Option<EventId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActivityKind {
    Drive,
    Wait,
    Transfer,
    Turnaround,
}

impl ActivityKind {
    pub const ALL: [ActivityKind; 4] = [
        ActivityKind::Drive,
        ActivityKind::Wait,
        ActivityKind::Transfer,
        ActivityKind::Turnaround,
    ];

    /// Drive, wait and turnaround activities are operated by a vehicle and
    /// carry delays; transfers are passenger connections only.
    pub fn is_vehicle(self) -> bool {
        !matches!(self, ActivityKind::Transfer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activity {
    pub id: ActivityId,
    pub kind: ActivityKind,
    pub tail: EventId,
    pub head: EventId,
    pub lower: Minutes,
    /// `None` means unbounded.
    pub upper: Option<Minutes>,
    /// Summed weights of the groups whose planned route uses this activity.
    pub passenger_load: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// A departure/arrival alternating event path operated by one vehicle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trip {
    pub id: TripId,
    pub line: LineId,
    pub direction: Direction,
    pub events: Vec<EventId>,
}

impl Trip {
    pub fn first_departure(&self) -> EventId {
        self.events[0]
    }

    pub fn last_arrival(&self) -> EventId {
        *self.events.last().expect("trip has events")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventActivityNetwork {
    pub events: Vec<Event>,
    pub activities: Vec<Activity>,
    pub trips: Vec<Trip>,
    outgoing: Vec<Vec<ActivityId>>,
    incoming: Vec<Vec<ActivityId>>,
}

impl EventActivityNetwork {
    /// Assembles a network and checks its structural invariants.
    pub fn from_parts(
        events: Vec<Event>,
        activities: Vec<Activity>,
        trips: Vec<Trip>,
    ) -> Result<Self> {
        let mut network = EventActivityNetwork {
            events,
            activities,
            trips,
            outgoing: Vec::new(),
            incoming: Vec::new(),
        };
        network.check()?;
        network.rebuild_adjacency();
        Ok(network)
    }

    /// The periodic network of a dataset: one trip per line, direction and
    /// frequency slot, plus transfers between every arrival and every
    /// departure of a different line at the same station.
    pub fn periodic(dataset: &Dataset) -> Result<Self> {
        let p = &dataset.params;
        let mut events = Vec::new();
        let mut activities = Vec::new();
        let mut trips = Vec::new();
        for line in &dataset.lines {
            for direction in [Direction::Forward, Direction::Backward] {
                let mut path = line.station_path.clone();
                if direction == Direction::Backward {
                    path.reverse();
                }
                for _ in 0..line.frequency {
                    let trip = trips.len();
                    let mut trip_events = Vec::with_capacity(2 * (path.len() - 1));
                    for (k, w) in path.windows(2).enumerate() {
                        let dep = events.len();
                        events.push(Event {
                            id: dep,
                            kind: EventKind::Departure,
                            station: w[0],
                            line: line.id,
                            trip,
                            periodic_parent: None,
                        });
                        let arr = events.len();
                        events.push(Event {
                            id: arr,
                            kind: EventKind::Arrival,
                            station: w[1],
                            line: line.id,
                            trip,
                            periodic_parent: None,
                        });
                        if k > 0 {
                            let prev_arr = *trip_events.last().unwrap();
                            activities.push(Activity {
                                id: activities.len(),
                                kind: ActivityKind::Wait,
                                tail: prev_arr,
                                head: dep,
                                lower: p.min_wait,
                                upper: Some(p.max_wait),
                                passenger_load: 0,
                            });
                        }
                        let edge = &dataset.edges[dataset.edge_between(w[0], w[1]).ok_or_else(
                            || Error::InvalidDataset(format!("line {} leaves the network", line.id)),
                        )?];
                        activities.push(Activity {
                            id: activities.len(),
                            kind: ActivityKind::Drive,
                            tail: dep,
                            head: arr,
                            lower: edge.min_drive,
                            upper: Some(edge.max_drive),
                            passenger_load: 0,
                        });
                        trip_events.push(dep);
                        trip_events.push(arr);
                    }
                    trips.push(Trip { id: trip, line: line.id, direction, events: trip_events });
                }
            }
        }
        let mut arrivals = vec![Vec::new(); dataset.station_count()];
        let mut departures = vec![Vec::new(); dataset.station_count()];
        for e in &events {
            match e.kind {
                EventKind::Arrival => arrivals[e.station].push(e.id),
                EventKind::Departure => departures[e.station].push(e.id),
            }
        }
        for s in 0..dataset.station_count() {
            for &a in &arrivals[s] {
                for &d in &departures[s] {
                    if events[a].line != events[d].line {
                        activities.push(Activity {
                            id: activities.len(),
                            kind: ActivityKind::Transfer,
                            tail: a,
                            head: d,
                            lower: p.min_transfer,
                            upper: Some(p.min_transfer + p.period - 1),
                            passenger_load: 0,
                        });
                    }
                }
            }
        }
        Self::from_parts(events, activities, trips)
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidDataset(msg));
        for (i, e) in self.events.iter().enumerate() {
            if e.id != i {
                return bad(format!("event ids must be dense, found {} at {}", e.id, i));
            }
            if e.trip >= self.trips.len() {
                return bad(format!("event {} references unknown trip {}", e.id, e.trip));
            }
        }
        for (i, t) in self.trips.iter().enumerate() {
            if t.id != i {
                return bad(format!("trip ids must be dense, found {} at {}", t.id, i));
            }
            if t.events.len() < 2 || t.events.len() % 2 != 0 {
                return bad(format!("trip {} must alternate departure/arrival", t.id));
            }
            for (k, &e) in t.events.iter().enumerate() {
                let expected = if k % 2 == 0 { EventKind::Departure } else { EventKind::Arrival };
                match self.events.get(e) {
                    Some(ev) if ev.kind == expected && ev.trip == t.id => {}
                    _ => return bad(format!("trip {} must alternate departure/arrival", t.id)),
                }
            }
        }
        for (i, a) in self.activities.iter().enumerate() {
            if a.id != i {
                return bad(format!("activity ids must be dense, found {} at {}", a.id, i));
            }
            let (Some(tail), Some(head)) = (self.events.get(a.tail), self.events.get(a.head))
            else {
                return bad(format!("activity {} references an unknown event", a.id));
            };
            if a.lower < 0 || a.upper.is_some_and(|u| u < a.lower) {
                return bad(format!("activity {} must satisfy 0 <= lower <= upper", a.id));
            }
            let ok = match a.kind {
                ActivityKind::Drive => {
                    tail.kind == EventKind::Departure
                        && head.kind == EventKind::Arrival
                        && tail.trip == head.trip
                        && tail.station != head.station
                }
                ActivityKind::Wait => {
                    tail.kind == EventKind::Arrival
                        && head.kind == EventKind::Departure
                        && tail.trip == head.trip
                        && tail.station == head.station
                }
                ActivityKind::Transfer => {
                    tail.kind == EventKind::Arrival
                        && head.kind == EventKind::Departure
                        && tail.station == head.station
                }
                ActivityKind::Turnaround => {
                    tail.kind == EventKind::Arrival
                        && head.kind == EventKind::Departure
                        && self.trips[tail.trip].last_arrival() == tail.id
                        && self.trips[head.trip].first_departure() == head.id
                }
            };
            if !ok {
                return bad(format!("activity {} ({:?}) joins incompatible events", a.id, a.kind));
            }
        }
        Ok(())
    }

    fn rebuild_adjacency(&mut self) {
        let mut outgoing = vec![Vec::new(); self.events.len()];
        let mut incoming = vec![Vec::new(); self.events.len()];
        for a in &self.activities {
            outgoing[a.tail].push(a.id);
            incoming[a.head].push(a.id);
        }
        self.outgoing = outgoing;
        self.incoming = incoming;
    }

    /// Appends an activity, keeping adjacency current. Kind consistency is the
    /// caller's responsibility.
    pub(crate) fn push_activity(
        &mut self,
        kind: ActivityKind,
        tail: EventId,
        head: EventId,
        lower: Minutes,
        upper: Option<Minutes>,
    ) -> ActivityId {
        let id = self.activities.len();
        self.activities.push(Activity { id, kind, tail, head, lower, upper, passenger_load: 0 });
        self.outgoing[tail].push(id);
        self.incoming[head].push(id);
        id
    }

    /// Drops every activity of `kind` and renumbers the rest densely.
    pub(crate) fn remove_activities_of(&mut self, kind: ActivityKind) {
        self.activities.retain(|a| a.kind != kind);
        for (i, a) in self.activities.iter_mut().enumerate() {
            a.id = i;
        }
        self.rebuild_adjacency();
    }

    pub fn outgoing(&self, e: EventId) -> &[ActivityId] {
        &self.outgoing[e]
    }

    pub fn incoming(&self, e: EventId) -> &[ActivityId] {
        &self.incoming[e]
    }

    pub fn activities_of(&self, kind: ActivityKind) -> impl Iterator<Item = &Activity> + '_ {
        self.activities.iter().filter(move |a| a.kind == kind)
    }

    /// The network edge a drive activity runs on.
    pub fn drive_edge(&self, dataset: &Dataset, a: ActivityId) -> Option<EdgeId> {
        let act = &self.activities[a];
        if act.kind != ActivityKind::Drive {
            return None;
        }
        dataset.edge_between(self.events[act.tail].station, self.events[act.head].station)
    }

    /// Topological order of the events with respect to vehicle activities
    /// (drive, wait, turnaround). Ready events are released in increasing
    /// `priority`, then id.
    pub fn vehicle_order(&self, priority: &[Minutes]) -> Result<Vec<EventId>> {
        let n = self.events.len();
        let mut indegree = vec![0usize; n];
        for a in self.activities.iter().filter(|a| a.kind.is_vehicle()) {
            indegree[a.head] += 1;
        }
        let mut ready: BinaryHeap<Reverse<(Minutes, EventId)>> = indegree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(e, _)| Reverse((priority[e], e)))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse((_, e))) = ready.pop() {
            order.push(e);
            for &a in &self.outgoing[e] {
                let act = &self.activities[a];
                if act.kind.is_vehicle() {
                    indegree[act.head] -= 1;
                    if indegree[act.head] == 0 {
                        ready.push(Reverse((priority[act.head], act.head)));
                    }
                }
            }
        }
        if order.len() < n {
            let stuck = indegree.iter().position(|&d| d > 0).unwrap_or(0);
            return Err(Error::Cycle(stuck));
        }
        Ok(order)
    }
}
