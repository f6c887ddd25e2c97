//! Shared fixtures for the criterion benchmarks.

use hyperjaya_core::{DecompositionPlan, EngineConfig, Objective};

/// Engine configuration with a fixed iteration count and seed.
pub fn engine_config(
    objective: Objective,
    n: usize,
    m: usize,
    threads: usize,
    conf_h: usize,
    conf_v: usize,
    iterations: u64,
) -> EngineConfig {
    let plan = DecompositionPlan::for_objective(n, m, threads, conf_h, conf_v, objective)
        .expect("benchmark plan must be valid");
    EngineConfig::new(plan, objective, iterations, 0x5eed)
}
