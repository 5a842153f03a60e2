//! Infrastructure, line concept, demand and event-activity networks.

pub(crate) mod dataset;
mod ean;
mod schedule;
mod timetable;

pub use dataset::{
    Dataset, DeadheadTable, GroupId, Line, LineId, NetworkEdge, EdgeId, PassengerGroup,
    PlanningParams, Station, StationId,
};
pub use ean::{
    Activity, ActivityId, ActivityKind, Direction, Event, EventActivityNetwork, EventId, EventKind,
    Trip, TripId,
};
pub use schedule::{attach_turnarounds, validate_schedule, ScheduleViolation, VehicleSchedule};
pub use timetable::{
    aperiodic_slack, periodic_slack, roll_out, validate_periodic, AperiodicTimetable,
    PeriodicTimetable, PeriodicViolation,
};
