//! Command-line workflow over the `vecmkit` library: configuration handling
//! and one subcommand per analysis step.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{execute, Command, Outcome};
pub use config::{parse_config, Overrides, RunConfig};
pub use error::{CliError, CliResult};
