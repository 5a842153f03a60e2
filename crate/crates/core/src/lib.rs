//! Robustness evaluation for public transport timetables.
//!
//! The crate covers the whole algorithmic pipeline on top of an
//! event-activity network:
//!
//! - [`network`]: infrastructure, line concept, demand, periodic and
//!   aperiodic event-activity networks, timetables and vehicle schedules.
//! - [`simulation`]: no-wait delay propagation and capacity-aware passenger
//!   routing under a seat-reservation model.
//! - [`robustness`]: the four stress tests and cross-instance normalization.
//! - [`features`]: the fixed-length key-feature fingerprint of an instance.
//! - [`surrogate`]: a dense ReLU regressor trained with Adam that predicts the
//!   four robustness values from the fingerprint.
//! - [`search`]: slack-injection hill climbing guided by a robustness oracle.
//! - [`generate`]: artificial datasets and corpora of timetable variants.
//!
//! The crate is `no_std` and only needs `alloc`. Enabling the `parallel`
//! feature runs independent simulations and neighbour evaluations on rayon;
//! every reduction is done in index order so results do not depend on the
//! thread count.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod features;
pub mod generate;
pub mod instance;
pub mod network;
mod par;
pub mod rng;
pub mod robustness;
pub mod search;
pub mod simulation;
pub mod surrogate;

pub use error::{Error, Result};
pub use instance::Instance;

/// Times and durations are whole minutes.
pub type Minutes = i64;
