//! Configuration, orchestration and file output for `lorentz-flow`.
//!
//! - [`config`]: the TOML experiment schema and its validation.
//! - [`run`]: builds surfaces, flows and frames from a config and writes outputs.
//! - [`output`]: CSV, JSON and OBJ encoders.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, ExperimentConfig};
pub use error::CliError;
pub use run::{run, RunReport};
