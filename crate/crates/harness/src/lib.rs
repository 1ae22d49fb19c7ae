//! Experiment harness for `mirrorboost`: configuration, data loading and
//! synthetic generators, decision stumps, trace files, certificate reports
//! and the `mirrorboost` command line.
//!
//! Exit codes of the binary are listed in [`error::exit`].

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{ExperimentConfig, ScheduleKind, Task};
pub use data::DataSource;
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, Outcome, TraceHeader};
