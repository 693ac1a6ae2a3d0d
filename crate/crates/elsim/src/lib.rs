//! Experiment orchestration, initial data, configuration and artifact
//! output on top of `elsim-core`.

pub mod config;
mod error;
pub mod experiment;
pub mod output;
pub mod recipe;
pub mod snapshot;
pub mod suite;

pub use config::{ExperimentKind, RunConfig};
pub use error::AppError;
pub use experiment::{execute, run_experiment};
pub use output::{write_outputs, Artifacts, Manifest};
