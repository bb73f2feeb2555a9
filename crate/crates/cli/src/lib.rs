//! Command-line front end: configuration files, result files, and subcommands.

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod validate;
pub mod values;

pub use app::{run, Cli};
pub use config::{config_to_json, load_config, parse_config};
pub use error::{CliError, CliResult};
pub use output::{summary_csv, write_results, RunManifest, SUMMARY_HEADER};
pub use values::parse_values;
