//! Experiment harness: repeated seeded runs, statistics and CSV output.

pub mod error;
pub mod experiment;
pub mod report;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, EngineKind, ExperimentReport, ExperimentSpec, Mode};
