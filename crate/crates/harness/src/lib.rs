//! Configuration, dispatch, result records, sweeps and the acceptance suite
//! for the `qmaplus` simulations.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod record;
pub mod sweep;

pub use config::{Experiment, ExperimentConfig, Overrides, ProverMode};
pub use error::{HarnessError, Result};
pub use record::ResultRecord;
