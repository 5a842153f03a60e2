//! A dataset together with an aperiodic timetable, a vehicle schedule and
//! planned passenger routes.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::network::{
    aperiodic_slack, ActivityId, ActivityKind, AperiodicTimetable, Dataset, EventActivityNetwork,
    EventId, EventKind, GroupId, VehicleSchedule,
};
use crate::simulation::{self, PassengerRoute, UtilityWeights};
use crate::{Error, Minutes, Result};

#[derive(Debug, Clone)]
pub struct Instance {
    pub dataset: Arc<Dataset>,
    /// Aperiodic network including the turnarounds induced by `schedule`.
    pub network: EventActivityNetwork,
    pub timetable: AperiodicTimetable,
    pub schedule: VehicleSchedule,
    routes: Vec<PassengerRoute>,
    vehicle_order: Vec<EventId>,
    rank: Vec<u32>,
    departures_at: Vec<Vec<EventId>>,
    drives_on_edge: Vec<Vec<ActivityId>>,
    group_order: Vec<GroupId>,
}

impl Instance {
    /// Builds an instance without passenger routes. The network must already
    /// carry the schedule's turnaround activities.
    pub fn new(
        dataset: Arc<Dataset>,
        network: EventActivityNetwork,
        timetable: AperiodicTimetable,
        schedule: VehicleSchedule,
    ) -> Result<Self> {
        if timetable.times.len() != network.events.len() {
            let missing = (timetable.times.len()..network.events.len()).collect();
            return Err(Error::MissingEventTimes(missing));
        }
        for e in &network.events {
            if e.station >= dataset.station_count() {
                return Err(Error::UnknownId { kind: "station", id: e.station });
            }
        }
        let vehicle_order = network.vehicle_order(&timetable.times)?;
        let mut rank = vec![0u32; network.events.len()];
        for (i, &e) in vehicle_order.iter().enumerate() {
            rank[e] = i as u32;
        }
        let mut departures_at = vec![Vec::new(); dataset.station_count()];
        for e in &network.events {
            if e.kind == EventKind::Departure {
                departures_at[e.station].push(e.id);
            }
        }
        let mut drives_on_edge = vec![Vec::new(); dataset.edge_count()];
        for a in network.activities_of(ActivityKind::Drive) {
            if let Some(edge) = network.drive_edge(&dataset, a.id) {
                drives_on_edge[edge].push(a.id);
            }
        }
        let mut group_order: Vec<GroupId> = (0..dataset.groups.len()).collect();
        group_order.sort_by_key(|&g| (dataset.groups[g].earliest_departure, g));
        Ok(Instance {
            dataset,
            network,
            timetable,
            schedule,
            routes: Vec::new(),
            vehicle_order,
            rank,
            departures_at,
            drives_on_edge,
            group_order,
        })
    }

    /// Planned routes, indexed by group. Empty until routes are planned or set.
    pub fn routes(&self) -> &[PassengerRoute] {
        &self.routes
    }

    pub fn has_routes(&self) -> bool {
        !self.routes.is_empty() || self.dataset.groups.is_empty()
    }

    /// Routes every group on the current timetable, first come first served,
    /// and records the resulting activity loads.
    pub fn plan_routes(&mut self, weights: &UtilityWeights) {
        let routes = simulation::plan_routes(self, weights);
        self.set_routes(routes).expect("planned routes reference valid activities");
    }

    pub fn with_planned_routes(mut self, weights: &UtilityWeights) -> Self {
        self.plan_routes(weights);
        self
    }

    /// Installs externally supplied routes and recomputes passenger loads.
    pub fn set_routes(&mut self, routes: Vec<PassengerRoute>) -> Result<()> {
        if routes.len() != self.dataset.groups.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dataset.groups.len(),
                got: routes.len(),
            });
        }
        for a in &mut self.network.activities {
            a.passenger_load = 0;
        }
        for r in &routes {
            let w = u64::from(self.dataset.groups[r.group].weight);
            for &a in &r.activities {
                let act = self
                    .network
                    .activities
                    .get_mut(a)
                    .ok_or(Error::UnknownId { kind: "activity", id: a })?;
                act.passenger_load += w;
            }
        }
        self.routes = routes;
        Ok(())
    }

    /// Replaces the timetable, keeping routes and loads. The network topology
    /// is unchanged so the cached orders stay valid.
    pub fn set_timetable(&mut self, timetable: AperiodicTimetable) {
        assert_eq!(timetable.times.len(), self.network.events.len());
        self.timetable = timetable;
    }

    /// Events in an order compatible with every vehicle activity.
    pub fn vehicle_order(&self) -> &[EventId] {
        &self.vehicle_order
    }

    pub(crate) fn rank(&self, e: EventId) -> u32 {
        self.rank[e]
    }

    pub(crate) fn departures_at(&self, station: usize) -> &[EventId] {
        &self.departures_at[station]
    }

    pub fn drives_on_edge(&self, edge: usize) -> &[ActivityId] {
        &self.drives_on_edge[edge]
    }

    /// Groups in first-come-first-served order.
    pub(crate) fn group_order(&self) -> &[GroupId] {
        &self.group_order
    }

    pub fn slack(&self, a: ActivityId) -> Minutes {
        aperiodic_slack(&self.network.activities[a], &self.timetable)
    }

    /// Activities whose scheduled duration falls below their lower bound.
    pub fn lower_bound_violations(&self) -> Vec<ActivityId> {
        self.network
            .activities
            .iter()
            .filter(|a| aperiodic_slack(a, &self.timetable) < 0)
            .map(|a| a.id)
            .collect()
    }

    /// Sum over groups of weight times perceived travel time on the current
    /// timetable with the stored routes.
    pub fn total_perceived_time(&self, weights: &UtilityWeights) -> i64 {
        self.total_perceived_time_with(&self.timetable.times, weights)
    }

    /// As `total_perceived_time`, on other event times.
    pub fn total_perceived_time_with(&self, times: &[Minutes], weights: &UtilityWeights) -> i64 {
        self.routes
            .iter()
            .map(|r| {
                let g = &self.dataset.groups[r.group];
                i64::from(g.weight)
                    * simulation::perceived_time(r, g, &self.network, times, weights)
            })
            .sum()
    }

    /// The first trip of every vehicle tour.
    pub fn tour_starts(&self) -> impl Iterator<Item = usize> + '_ {
        self.schedule.tours.iter().filter_map(|t| t.first().copied())
    }
}
