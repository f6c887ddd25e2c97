//! Jaya and hierarchical hyper-population cooperative parallel Jaya (HHCPJaya).
//!
//! - [`objective`]: benchmark functions with bounds and arity.
//! - [`jaya`]: the sequential optimiser.
//! - [`decomposition`]: block decomposition of the population matrix.
//! - [`engine`]: the multi-threaded cooperative engine.
//! - [`stats`]: summaries, rank-sum test and speedup.

pub mod decomposition;
pub mod engine;
pub mod error;
pub mod jaya;
pub mod objective;
pub mod rng;
pub mod run;
pub mod stats;

pub use decomposition::{BlockExtent, DecompositionPlan, LocalLayout};
pub use engine::{run_hhcp, EngineConfig, EngineOutcome};
pub use error::{Error, Result};
pub use jaya::{run_sequential, JayaConfig, Population};
pub use objective::{Bounds, Objective};
pub use rng::{RngStream, UniformSource};
pub use run::{RunRecord, RunTrace, StopReason};
pub use stats::{summarize, wilcoxon_rank_sum, StatsSummary};

/// Fitness below which a run counts as having reached the optimum.
pub const CONVERGENCE_TARGET: f64 = 1e-7;

/// Candidate-evaluation budget of the solution-quality protocol.
pub const QUALITY_BUDGET: u64 = 128_000;

/// Iteration cap of the convergence protocol.
pub const CONVERGENCE_MAX_ITER: u64 = 10_000;
