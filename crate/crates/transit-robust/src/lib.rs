//! File formats, run manifests and the `transit-robust` command line on top
//! of [`transit_robust_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod manifest;

pub use error::{Error, Result};
