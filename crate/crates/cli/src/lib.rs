//! Experiment runner for Busemann strainer maps on flat cones.

pub mod config;
mod error;
pub mod experiments;
pub mod report;

pub use config::{ConfigError, Experiment, Overrides, RawConfig, ScenarioConfig};
pub use error::CliError;
pub use experiments::{evaluate, run_scenario, Outcome, Table};
pub use report::{Provenance, Report};
