//! Command-line driver for `ptchain`: configuration, batch runs and CSV
//! output.

pub mod config;
pub mod overrides;
pub mod run;
pub mod validate;

pub use config::{parse_config, RunConfig};
pub use run::{run, RunReport};
