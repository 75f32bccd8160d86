//! Command-line front end for `dnls-core`: TOML run configurations, CSV
//! time series and JSON summaries.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, ConfigError, RunConfig};
pub use output::{Check, Summary, TIMESERIES_HEADER};
pub use run::{run, RunError, Subcommand};
