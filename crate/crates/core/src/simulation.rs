//! No-wait delay propagation and capacity-aware passenger routing.
//!
//! Passengers are served first come first served by a seat-reservation
//! oracle: a group keeps its planned route as long as every planned transfer
//! still works on the delayed timetable and every vehicle on it has room.
//! Otherwise it is routed again from its origin with full knowledge of the
//! delays, or stranded when nothing reaches its destination.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::network::{
    ActivityId, ActivityKind, EdgeId, EventActivityNetwork, EventId, EventKind, GroupId,
    PassengerGroup, StationId, TripId,
};
use crate::{Error, Instance, Minutes, Result};

/// Weights of the perceived travel time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UtilityWeights {
    /// Minutes charged per transfer.
    pub transfer_penalty: Minutes,
    /// Perceived time charged to a group that cannot reach its destination.
    pub stranding_penalty: Minutes,
}

impl Default for UtilityWeights {
    fn default() -> Self {
        UtilityWeights { transfer_penalty: 15, stranding_penalty: 240 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeSlowdown {
    pub edge: EdgeId,
    pub extra: Minutes,
    /// Drives whose scheduled departure lies in `[start, end)` are slowed.
    pub start: Minutes,
    pub end: Minutes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationBlocking {
    pub station: StationId,
    pub start: Minutes,
    pub duration: Minutes,
}

/// Source delays applied together in one simulation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DelayScenario {
    /// Extra minutes at the first departure of a trip.
    pub source_delays: Vec<(TripId, Minutes)>,
    /// Extra minutes on the duration of single activities.
    pub activity_delays: Vec<(ActivityId, Minutes)>,
    pub edge_slowdowns: Vec<EdgeSlowdown>,
    pub station_blockings: Vec<StationBlocking>,
    pub seed: u64,
}

impl DelayScenario {
    pub fn is_empty(&self) -> bool {
        self.source_delays.is_empty()
            && self.activity_delays.is_empty()
            && self.edge_slowdowns.is_empty()
            && self.station_blockings.is_empty()
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let negative = |what: &str| Err(Error::InvalidConfig(alloc::format!("negative {what}")));
        for &(trip, d) in &self.source_delays {
            if trip >= instance.network.trips.len() {
                return Err(Error::UnknownId { kind: "trip", id: trip });
            }
            if d < 0 {
                return negative("source delay");
            }
        }
        for &(a, d) in &self.activity_delays {
            if a >= instance.network.activities.len() {
                return Err(Error::UnknownId { kind: "activity", id: a });
            }
            if d < 0 {
                return negative("activity delay");
            }
        }
        for s in &self.edge_slowdowns {
            if s.edge >= instance.dataset.edge_count() {
                return Err(Error::UnknownId { kind: "edge", id: s.edge });
            }
            if s.extra < 0 || s.start < 0 || s.end < s.start {
                return negative("slowdown or window");
            }
        }
        for b in &self.station_blockings {
            if b.station >= instance.dataset.station_count() {
                return Err(Error::UnknownId { kind: "station", id: b.station });
            }
            if b.duration < 0 || b.start < 0 {
                return negative("blocking");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RouteStatus {
    Completed,
    Rerouted,
    Stranded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassengerRoute {
    pub group: GroupId,
    /// Consecutive activities sharing an event; empty when stranded.
    pub activities: Vec<ActivityId>,
    pub planned_departure: Minutes,
    pub planned_arrival: Minutes,
    pub realized_arrival: Minutes,
    pub transfers: u32,
    pub status: RouteStatus,
}

impl PassengerRoute {
    /// Rebuilds a route from its activity sequence on the given times.
    pub fn from_activities(
        group: GroupId,
        activities: Vec<ActivityId>,
        network: &EventActivityNetwork,
        times: &[Minutes],
    ) -> Result<Self> {
        if activities.is_empty() {
            return Ok(PassengerRoute {
                group,
                activities,
                planned_departure: 0,
                planned_arrival: 0,
                realized_arrival: 0,
                transfers: 0,
                status: RouteStatus::Stranded,
            });
        }
        for &a in &activities {
            if a >= network.activities.len() {
                return Err(Error::UnknownId { kind: "activity", id: a });
            }
        }
        for w in activities.windows(2) {
            if network.activities[w[0]].head != network.activities[w[1]].tail {
                return Err(Error::InvalidConfig(alloc::format!(
                    "route of group {group} is not connected at activity {}",
                    w[1]
                )));
            }
        }
        let first = &network.activities[activities[0]];
        let last = &network.activities[*activities.last().unwrap()];
        let transfers = activities
            .iter()
            .filter(|&&a| network.activities[a].kind == ActivityKind::Transfer)
            .count() as u32;
        Ok(PassengerRoute {
            group,
            planned_departure: times[first.tail],
            planned_arrival: times[last.head],
            realized_arrival: times[last.head],
            transfers,
            activities,
            status: RouteStatus::Completed,
        })
    }

    pub fn is_stranded(&self) -> bool {
        self.status == RouteStatus::Stranded
    }
}

/// Arrival minus earliest departure plus transfer penalties, evaluated on
/// `times`; the stranding penalty for stranded routes.
pub fn perceived_time(
    route: &PassengerRoute,
    group: &PassengerGroup,
    network: &EventActivityNetwork,
    times: &[Minutes],
    weights: &UtilityWeights,
) -> Minutes {
    match route.activities.last() {
        Some(&last) if !route.is_stranded() => {
            times[network.activities[last].head] - group.earliest_departure
                + weights.transfer_penalty * Minutes::from(route.transfers)
        }
        _ => weights.stranding_penalty,
    }
}

/// Realized event times under `scenario` with no-wait delay management.
///
/// Along drive, wait and turnaround activities
/// `realized(head) = max(scheduled(head), realized(tail) + lower + extra)`;
/// transfers never propagate delay. Departures at a blocked station inside
/// the blocking window are pushed to its end.
pub fn propagate(instance: &Instance, scenario: &DelayScenario) -> Result<Vec<Minutes>> {
    scenario.validate(instance)?;
    let network = &instance.network;
    let scheduled = &instance.timetable.times;

    let mut extra = vec![0 as Minutes; network.activities.len()];
    for &(a, d) in &scenario.activity_delays {
        extra[a] += d;
    }
    for s in &scenario.edge_slowdowns {
        for &a in instance.drives_on_edge(s.edge) {
            let t = scheduled[network.activities[a].tail];
            if s.start <= t && t < s.end {
                extra[a] += s.extra;
            }
        }
    }
    let mut floor = scheduled.clone();
    for &(trip, d) in &scenario.source_delays {
        let e = network.trips[trip].first_departure();
        floor[e] = floor[e].max(scheduled[e] + d);
    }
    let mut blockings: Vec<Vec<(Minutes, Minutes)>> = Vec::new();
    if !scenario.station_blockings.is_empty() {
        blockings = vec![Vec::new(); instance.dataset.station_count()];
        for b in &scenario.station_blockings {
            blockings[b.station].push((b.start, b.start + b.duration));
        }
        for list in &mut blockings {
            list.sort_unstable();
        }
    }

    let mut realized = floor;
    for &e in instance.vehicle_order() {
        let mut t = realized[e];
        for &a in network.incoming(e) {
            let act = &network.activities[a];
            if act.kind.is_vehicle() {
                t = t.max(realized[act.tail] + act.lower + extra[a]);
            }
        }
        let event = &network.events[e];
        if event.kind == EventKind::Departure && !blockings.is_empty() {
            for &(start, end) in &blockings[event.station] {
                if start <= t && t < end {
                    t = end;
                }
            }
        }
        realized[e] = t;
    }
    Ok(realized)
}

/// Remaining seats per activity; only drive activities are limited.
#[derive(Debug, Clone)]
pub struct CapacityState {
    remaining: Vec<u32>,
}

impl CapacityState {
    pub fn new(instance: &Instance) -> Self {
        let cap = instance.schedule.vehicle_capacity;
        let remaining = instance
            .network
            .activities
            .iter()
            .map(|a| if a.kind == ActivityKind::Drive { cap } else { u32::MAX })
            .collect();
        CapacityState { remaining }
    }

    pub fn remaining(&self, a: ActivityId) -> u32 {
        self.remaining[a]
    }

    pub fn fits(&self, activities: &[ActivityId], weight: u32) -> bool {
        activities.iter().all(|&a| self.remaining[a] >= weight)
    }

    pub fn reserve(&mut self, activities: &[ActivityId], weight: u32) {
        for &a in activities {
            if self.remaining[a] != u32::MAX {
                self.remaining[a] -= weight;
            }
        }
    }
}

/// Earliest-arrival style router on the time-expanded event graph.
///
/// Events are settled in increasing (time, topological rank), which is a
/// topological order of every usable arc. The label of an event is the
/// lexicographically smallest (transfers, last activity id), so the chosen
/// route minimizes (perceived time, transfers, final event id) and breaks the
/// remaining ties by the reversed activity sequence.
#[derive(Debug)]
pub struct Router<'a> {
    instance: &'a Instance,
    times: &'a [Minutes],
    weights: UtilityWeights,
    stamp: Vec<u32>,
    epoch: u32,
    transfers: Vec<u32>,
    via: Vec<Option<ActivityId>>,
    heap: BinaryHeap<Reverse<(Minutes, u32, EventId)>>,
}

impl<'a> Router<'a> {
    pub fn new(instance: &'a Instance, times: &'a [Minutes], weights: UtilityWeights) -> Self {
        let n = instance.network.events.len();
        Router {
            instance,
            times,
            weights,
            stamp: vec![0; n],
            epoch: 0,
            transfers: vec![0; n],
            via: vec![None; n],
            heap: BinaryHeap::new(),
        }
    }

    fn offer(&mut self, e: EventId, transfers: u32, via: Option<ActivityId>) {
        if self.stamp[e] != self.epoch {
            self.stamp[e] = self.epoch;
            self.transfers[e] = transfers;
            self.via[e] = via;
            self.heap.push(Reverse((self.times[e], self.instance.rank(e), e)));
        } else if (transfers, via) < (self.transfers[e], self.via[e]) {
            self.transfers[e] = transfers;
            self.via[e] = via;
        }
    }

    /// Best route for `group` given the seats left in `capacity`.
    pub fn route(&mut self, group: GroupId, capacity: &CapacityState) -> PassengerRoute {
        let instance = self.instance;
        let network = &instance.network;
        let g = &instance.dataset.groups[group];
        self.epoch += 1;
        self.heap.clear();
        for &d in instance.departures_at(g.origin) {
            if self.times[d] >= g.earliest_departure {
                self.offer(d, 0, None);
            }
        }
        let penalty = self.weights.transfer_penalty;
        let mut best: Option<(Minutes, u32, EventId)> = None;
        while let Some(Reverse((t, _, v))) = self.heap.pop() {
            if best.is_some_and(|(p, _, _)| t - g.earliest_departure > p) {
                break;
            }
            let tr = self.transfers[v];
            let event = &network.events[v];
            if event.kind == EventKind::Arrival && event.station == g.destination {
                let cand = (t - g.earliest_departure + penalty * Minutes::from(tr), tr, v);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
            for &a in network.outgoing(v) {
                let act = &network.activities[a];
                let next = match act.kind {
                    ActivityKind::Drive if capacity.remaining(a) >= g.weight => tr,
                    ActivityKind::Wait => tr,
                    ActivityKind::Transfer if self.times[act.head] - t >= act.lower => tr + 1,
                    _ => continue,
                };
                self.offer(act.head, next, Some(a));
            }
        }
        let Some((_, transfers, end)) = best else {
            return PassengerRoute {
                group,
                activities: Vec::new(),
                planned_departure: g.earliest_departure,
                planned_arrival: g.earliest_departure + self.weights.stranding_penalty,
                realized_arrival: g.earliest_departure + self.weights.stranding_penalty,
                transfers: 0,
                status: RouteStatus::Stranded,
            };
        };
        let mut activities = Vec::new();
        let mut e = end;
        while let Some(a) = self.via[e] {
            activities.push(a);
            e = network.activities[a].tail;
        }
        activities.reverse();
        PassengerRoute {
            group,
            planned_departure: self.times[e],
            planned_arrival: self.times[end],
            realized_arrival: self.times[end],
            transfers,
            activities,
            status: RouteStatus::Completed,
        }
    }
}

/// Routes one group on `times` with the given remaining capacity.
pub fn route_passenger(
    instance: &Instance,
    group: GroupId,
    times: &[Minutes],
    weights: &UtilityWeights,
    capacity: &CapacityState,
) -> Result<PassengerRoute> {
    let g = instance
        .dataset
        .groups
        .get(group)
        .ok_or(Error::UnknownId { kind: "group", id: group })?;
    let n = instance.dataset.station_count();
    if g.origin >= n || g.destination >= n {
        return Err(Error::UnknownId { kind: "station", id: g.origin.max(g.destination) });
    }
    Ok(Router::new(instance, times, *weights).route(group, capacity))
}

/// Plans every group's route on the scheduled timetable, first come first
/// served. Returned routes are indexed by group.
pub fn plan_routes(instance: &Instance, weights: &UtilityWeights) -> Vec<PassengerRoute> {
    let times = &instance.timetable.times;
    let mut capacity = CapacityState::new(instance);
    let mut router = Router::new(instance, times, *weights);
    let mut routes: Vec<Option<PassengerRoute>> = vec![None; instance.dataset.groups.len()];
    for &g in instance.group_order() {
        let route = router.route(g, &capacity);
        capacity.reserve(&route.activities, instance.dataset.groups[g].weight);
        routes[g] = Some(route);
    }
    routes.into_iter().map(|r| r.expect("every group routed")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupOutcome {
    pub planned_perceived: Minutes,
    pub realized_perceived: Minutes,
    pub status: RouteStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationOutcome {
    /// Indexed by group.
    pub groups: Vec<GroupOutcome>,
    /// `sum weight * max(0, realized - planned)` over groups.
    pub aggregate: u64,
}

/// Propagates `scenario` and replays every group through the seat-reservation
/// oracle in first-come-first-served order.
pub fn simulate(
    instance: &Instance,
    scenario: &DelayScenario,
    weights: &UtilityWeights,
) -> Result<SimulationOutcome> {
    if !instance.has_routes() {
        return Err(Error::MissingRoutes);
    }
    let realized = propagate(instance, scenario)?;
    let network = &instance.network;
    let scheduled = &instance.timetable.times;
    let mut capacity = CapacityState::new(instance);
    let mut router = Router::new(instance, &realized, *weights);
    let mut groups = vec![
        GroupOutcome { planned_perceived: 0, realized_perceived: 0, status: RouteStatus::Completed };
        instance.dataset.groups.len()
    ];
    let mut aggregate = 0u64;
    for &gid in instance.group_order() {
        let g = &instance.dataset.groups[gid];
        let planned = &instance.routes()[gid];
        let planned_perceived = perceived_time(planned, g, network, scheduled, weights);
        let keep = !planned.is_stranded()
            && capacity.fits(&planned.activities, g.weight)
            && planned.activities.iter().all(|&a| {
                let act = &network.activities[a];
                act.kind != ActivityKind::Transfer
                    || realized[act.head] - realized[act.tail] >= act.lower
            });
        let (realized_perceived, status) = if keep {
            capacity.reserve(&planned.activities, g.weight);
            (perceived_time(planned, g, network, &realized, weights), RouteStatus::Completed)
        } else {
            let mut route = router.route(gid, &capacity);
            capacity.reserve(&route.activities, g.weight);
            if !route.is_stranded() {
                route.status = RouteStatus::Rerouted;
            }
            (perceived_time(&route, g, network, &realized, weights), route.status)
        };
        let increase = (realized_perceived - planned_perceived).max(0) as u64;
        aggregate += u64::from(g.weight) * increase;
        groups[gid] = GroupOutcome { planned_perceived, realized_perceived, status };
    }
    Ok(SimulationOutcome { groups, aggregate })
}
