//! Random tiny instances and an exhaustive reference simulator.
//!
//! The reference shares no code with the library: realized times come from a
//! plain fixpoint iteration over all vehicle activities, and routes from
//! enumerating every path of the event graph.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use transit_robust_core::generate::fixtures::{hand_instance, TripSpec};
use transit_robust_core::network::{
    ActivityKind, Dataset, EventKind, Line, NetworkEdge, PassengerGroup, PlanningParams, Station,
};
use transit_robust_core::simulation::{DelayScenario, EdgeSlowdown, GroupOutcome, RouteStatus, StationBlocking};
use transit_robust_core::simulation::UtilityWeights;
use transit_robust_core::{Instance, Minutes};

const LINES: [[usize; 4]; 3] = [[0, 1, 2, 3], [1, 2, 3, 0], [3, 0, 1, 2]];

/// A four-station cycle with up to four trips (at most 12 events) and up to
/// three groups, with small vehicles so that capacity matters.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    loop {
        if let Some(inst) = try_instance(rng) {
            return inst;
        }
    }
}

fn try_instance(rng: &mut ChaCha8Rng) -> Option<Instance> {
    let stations = (0..4).map(|id| Station { id, name: format!("S{id}") }).collect();
    let edges: Vec<NetworkEdge> = [(0, 1), (1, 2), (2, 3), (3, 0)]
        .iter()
        .enumerate()
        .map(|(id, &(from, to))| {
            let min_drive = rng.random_range(2..=6);
            NetworkEdge { id, from, to, min_drive, max_drive: min_drive + rng.random_range(0..=3) }
        })
        .collect();
    let lines = LINES
        .iter()
        .enumerate()
        .map(|(id, p)| Line { id, station_path: p.to_vec(), frequency: 1 })
        .collect();
    let params = PlanningParams { vehicle_capacity: rng.random_range(3..=8), ..PlanningParams::default() };
    let drive_of = |a: usize, b: usize, edges: &[NetworkEdge]| {
        edges.iter().find(|e| (e.from, e.to) == (a, b) || (e.from, e.to) == (b, a)).unwrap().clone()
    };

    let mut trips: Vec<TripSpec> = Vec::new();
    let mut events = 0;
    for _ in 0..rng.random_range(1..=4) {
        let (line, stops, mut t) = match trips.last() {
            // a connection on another line a few minutes after the arrival
            Some(prev) if rng.random_bool(0.6) => {
                let at = *prev.stops.last().unwrap();
                let line = (prev.line + rng.random_range(1..3)) % 3;
                let i = LINES[line].iter().position(|&x| x == at).unwrap();
                let next = if i + 1 < 4 { LINES[line][i + 1] } else { LINES[line][i - 1] };
                (line, vec![at, next], prev.times.last().unwrap() + rng.random_range(2..=8))
            }
            // a later run of the same trip gives passengers an alternative
            Some(prev) if rng.random_bool(0.3) => (prev.line, prev.stops.clone(), prev.times[0] + rng.random_range(3..=15)),
            _ => {
                let line = rng.random_range(0..3);
                let len = rng.random_range(2..=3);
                let first = rng.random_range(0..=4 - len);
                let mut stops: Vec<usize> = LINES[line][first..first + len].to_vec();
                if rng.random_bool(0.5) {
                    stops.reverse();
                }
                (line, stops, rng.random_range(0..=25))
            }
        };
        events += 2 * (stops.len() - 1);
        if events > 12 {
            break;
        }
        let mut times = Vec::new();
        for (k, w) in stops.windows(2).enumerate() {
            if k > 0 {
                t += params.min_wait + rng.random_range(0..=params.max_wait - params.min_wait);
            }
            times.push(t);
            let e = drive_of(w[0], w[1], &edges);
            t += e.min_drive + rng.random_range(0..=e.max_drive - e.min_drive);
            times.push(t);
        }
        trips.push(TripSpec { line, stops, times });
    }
    let tours = if trips.len() > 1 && rng.random_bool(0.5) {
        let mut order: Vec<usize> = (0..trips.len()).collect();
        order.sort_by_key(|&i| trips[i].times[0]);
        Some(vec![order])
    } else {
        None
    };
    // mostly along a trip so that routing matters; sometimes anywhere
    let groups: Vec<PassengerGroup> = (0..rng.random_range(1..=3))
        .map(|_| {
            let k = rng.random_range(0..trips.len());
            let trip = &trips[k];
            let (origin, destination) = match rng.random_range(0..10) {
                // across a connection to the next trip
                0..=4 if k + 1 < trips.len() => (trip.stops[0], *trips[k + 1].stops.last().unwrap()),
                0..=7 => {
                    let i = rng.random_range(0..trip.stops.len() - 1);
                    (trip.stops[i], trip.stops[rng.random_range(i + 1..trip.stops.len())])
                }
                _ => (rng.random_range(0..4), rng.random_range(0..4)),
            };
            let destination = if destination == origin { (origin + 1) % 4 } else { destination };
            PassengerGroup {
                origin,
                destination,
                earliest_departure: (trip.times[0] - rng.random_range(0..=5)).max(0),
                weight: rng.random_range(1..=4),
            }
        })
        .collect();
    let dataset = Dataset::new(stations, edges, lines, groups, params).ok()?;
    let w = UtilityWeights::default();
    hand_instance(dataset.clone(), &trips, tours, Some(&w))
        .or_else(|_| hand_instance(dataset, &trips, None, Some(&w)))
        .ok()
}

pub fn random_scenario(inst: &Instance, rng: &mut ChaCha8Rng) -> DelayScenario {
    let mut s = DelayScenario::default();
    for t in 0..inst.network.trips.len() {
        if rng.random_bool(0.5) {
            s.source_delays.push((t, rng.random_range(0..=15)));
        }
    }
    for _ in 0..rng.random_range(0..=2) {
        s.activity_delays.push((rng.random_range(0..inst.network.activities.len()), rng.random_range(1..=10)));
    }
    if rng.random_bool(0.3) {
        let start = rng.random_range(0..=30);
        s.edge_slowdowns.push(EdgeSlowdown {
            edge: rng.random_range(0..inst.dataset.edge_count()),
            extra: rng.random_range(1..=8),
            start,
            end: start + rng.random_range(0..=40),
        });
    }
    if rng.random_bool(0.3) {
        s.station_blockings.push(StationBlocking {
            station: rng.random_range(0..4),
            start: rng.random_range(0..=30),
            duration: rng.random_range(1..=15),
        });
    }
    s
}

/// Realized times as the least fixpoint of the no-wait rules.
pub fn reference_times(inst: &Instance, s: &DelayScenario) -> Vec<Minutes> {
    let net = &inst.network;
    let sched = &inst.timetable.times;
    let mut extra = vec![0; net.activities.len()];
    for &(a, d) in &s.activity_delays {
        extra[a] += d;
    }
    for a in &net.activities {
        if a.kind != ActivityKind::Drive {
            continue;
        }
        let edge = inst.dataset.edge_between(net.events[a.tail].station, net.events[a.head].station);
        for sl in &s.edge_slowdowns {
            if edge == Some(sl.edge) && sl.start <= sched[a.tail] && sched[a.tail] < sl.end {
                extra[a.id] += sl.extra;
            }
        }
    }
    let mut floor = sched.clone();
    for &(t, d) in &s.source_delays {
        let e = net.trips[t].events[0];
        floor[e] = floor[e].max(sched[e] + d);
    }
    let mut blocks = s.station_blockings.clone();
    blocks.sort_by_key(|b| (b.start, b.start + b.duration));
    let mut r = floor.clone();
    loop {
        let mut changed = false;
        for e in 0..r.len() {
            let mut t = floor[e];
            for a in &net.activities {
                if a.head == e && a.kind != ActivityKind::Transfer {
                    t = t.max(r[a.tail] + a.lower + extra[a.id]);
                }
            }
            if net.events[e].kind == EventKind::Departure {
                for b in blocks.iter().filter(|b| b.station == net.events[e].station) {
                    if b.start <= t && t < b.start + b.duration {
                        t = b.start + b.duration;
                    }
                }
            }
            if t != r[e] {
                r[e] = t;
                changed = true;
            }
        }
        if !changed {
            return r;
        }
    }
}

/// A route as its activities and transfer count; empty when stranded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefRoute {
    pub activities: Vec<usize>,
    pub transfers: u32,
}

type Key = (Minutes, u32, usize, Vec<usize>);

fn enumerate(
    inst: &Instance,
    times: &[Minutes],
    g: &PassengerGroup,
    seats: &[u32],
    penalty: Minutes,
    event: usize,
    path: &mut Vec<usize>,
    transfers: u32,
    best: &mut Option<(Key, RefRoute)>,
) {
    let net = &inst.network;
    let ev = &net.events[event];
    if ev.kind == EventKind::Arrival && ev.station == g.destination {
        let rev: Vec<usize> = path.iter().rev().copied().collect();
        let key = (times[event] - g.earliest_departure + penalty * Minutes::from(transfers), transfers, event, rev);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            *best = Some((key, RefRoute { activities: path.clone(), transfers }));
        }
    }
    for a in net.activities.iter().filter(|a| a.tail == event) {
        let tr = match a.kind {
            ActivityKind::Drive if seats[a.id] >= g.weight => transfers,
            ActivityKind::Wait => transfers,
            ActivityKind::Transfer if times[a.head] - times[a.tail] >= a.lower => transfers + 1,
            _ => continue,
        };
        path.push(a.id);
        enumerate(inst, times, g, seats, penalty, a.head, path, tr, best);
        path.pop();
    }
}

/// Best of all routes from a departure at the origin to an arrival at the
/// destination, by perceived time, transfers, final event and the reversed
/// activity sequence.
pub fn reference_route(inst: &Instance, times: &[Minutes], group: usize, seats: &[u32], w: &UtilityWeights) -> RefRoute {
    let g = &inst.dataset.groups[group];
    let mut best = None;
    for e in &inst.network.events {
        if e.kind == EventKind::Departure && e.station == g.origin && times[e.id] >= g.earliest_departure {
            enumerate(inst, times, g, seats, w.transfer_penalty, e.id, &mut Vec::new(), 0, &mut best);
        }
    }
    best.map_or(RefRoute { activities: Vec::new(), transfers: 0 }, |(_, r)| r)
}

fn perceived(inst: &Instance, r: &RefRoute, group: usize, times: &[Minutes], w: &UtilityWeights) -> Minutes {
    match r.activities.last() {
        None => w.stranding_penalty,
        Some(&a) => {
            times[inst.network.activities[a].head] - inst.dataset.groups[group].earliest_departure
                + w.transfer_penalty * Minutes::from(r.transfers)
        }
    }
}

fn fresh_seats(inst: &Instance) -> Vec<u32> {
    inst.network
        .activities
        .iter()
        .map(|a| if a.kind == ActivityKind::Drive { inst.schedule.vehicle_capacity } else { u32::MAX })
        .collect()
}

fn reserve(seats: &mut [u32], r: &RefRoute, weight: u32) {
    for &a in &r.activities {
        if seats[a] != u32::MAX {
            seats[a] -= weight;
        }
    }
}

fn arrival_order(inst: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.dataset.groups.len()).collect();
    order.sort_by_key(|&g| (inst.dataset.groups[g].earliest_departure, g));
    order
}

/// Planned routes on the scheduled times, first come first served.
pub fn reference_plan(inst: &Instance, w: &UtilityWeights) -> Vec<RefRoute> {
    let mut seats = fresh_seats(inst);
    let mut routes = vec![RefRoute { activities: Vec::new(), transfers: 0 }; inst.dataset.groups.len()];
    for g in arrival_order(inst) {
        let r = reference_route(inst, &inst.timetable.times, g, &seats, w);
        reserve(&mut seats, &r, inst.dataset.groups[g].weight);
        routes[g] = r;
    }
    routes
}

/// Per-group outcomes and the aggregate of one scenario.
pub fn reference_simulate(
    inst: &Instance,
    plan: &[RefRoute],
    s: &DelayScenario,
    w: &UtilityWeights,
) -> (Vec<GroupOutcome>, u64) {
    let net = &inst.network;
    let sched = &inst.timetable.times;
    let realized = reference_times(inst, s);
    let mut seats = fresh_seats(inst);
    let mut out = vec![
        GroupOutcome { planned_perceived: 0, realized_perceived: 0, status: RouteStatus::Completed };
        plan.len()
    ];
    let mut aggregate = 0u64;
    for g in arrival_order(inst) {
        let weight = inst.dataset.groups[g].weight;
        let p = &plan[g];
        let planned_perceived = perceived(inst, p, g, sched, w);
        let works = !p.activities.is_empty()
            && p.activities.iter().all(|&a| {
                let act = &net.activities[a];
                seats[a] >= weight
                    && (act.kind != ActivityKind::Transfer || realized[act.head] - realized[act.tail] >= act.lower)
            });
        let (route, status) = if works {
            (p.clone(), RouteStatus::Completed)
        } else {
            let r = reference_route(inst, &realized, g, &seats, w);
            let status = if r.activities.is_empty() { RouteStatus::Stranded } else { RouteStatus::Rerouted };
            (r, status)
        };
        reserve(&mut seats, &route, weight);
        let realized_perceived = perceived(inst, &route, g, &realized, w);
        aggregate += u64::from(weight) * (realized_perceived - planned_perceived).max(0) as u64;
        out[g] = GroupOutcome { planned_perceived, realized_perceived, status };
    }
    (out, aggregate)
}
