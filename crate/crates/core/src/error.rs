use alloc::string::String;
use alloc::vec::Vec;

use crate::Minutes;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("timetable has no time for events {0:?}")]
    MissingEventTimes(Vec<usize>),
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: usize },
    #[error("periodic timetable violates bounds of activity {activity} (slack {slack})")]
    InfeasiblePeriodic { activity: usize, slack: Minutes },
    #[error("activity graph contains a cycle through event {0}")]
    Cycle(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("distribution is not normalized (mass {0})")]
    UnnormalizedDistribution(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Diverged { epoch: usize, loss: f64 },
    #[error("instance has no planned passenger routes")]
    MissingRoutes,
}
