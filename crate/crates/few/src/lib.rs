//! File formats, run configuration and the command-line driver for
//! [`few_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod family;
pub mod json;
pub mod numfmt;
pub mod parallel;
pub mod sweep;

pub use config::{Format, RunConfig, Settings};
pub use error::{Error, Result};
pub use family::{Family, RangeSpec, StateSpec};
pub use json::{MatrixFile, MeasureReport, Provenance, WitnessFile};
pub use parallel::RayonMap;
pub use sweep::{run_sweep, SweepRow};
