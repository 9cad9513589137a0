//! Command-line harness: configuration, experiment orchestration and table
//! output for the `ira` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod timing;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
