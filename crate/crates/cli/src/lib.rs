//! Experiment runner: convergence sweeps, vacuum comparisons and oracle
//! validations driven by a JSON run configuration.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{cmd_ftable, cmd_oracle, cmd_shift, cmd_vacuum, Report};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
