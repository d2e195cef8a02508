//! Config loading, subcommands and validation checks behind the `qacs`
//! binary.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;

pub use commands::{run, Command, RunSpec};
pub use config::{load_config, parse_config, RunConfig};
pub use error::CliError;
