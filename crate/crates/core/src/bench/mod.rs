//! Experiment harness: config files, efficiency and variable-step batches, CSV output and the CLI.

pub mod cli;
pub mod config;
pub mod run;

pub use config::{ExperimentConfig, Mode, ProblemKind, ProblemSpec, SplitKind};
pub use run::{run_config, run_efficiency, run_variable, write_csv, RunRecord, RunSummary, CSV_HEADER};
