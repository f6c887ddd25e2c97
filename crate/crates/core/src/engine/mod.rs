//! Hierarchical hyper-population cooperative parallel Jaya.
//!
//! A fixed team of `threads` workers evolves its blocks in bulk-synchronous
//! iterations. Per iteration each worker memorises block best/worst, runs a
//! local update sweep, memorises again and publishes its level-1 best/worst;
//! worker 0 reduces those into the global best/worst block vectors; every
//! worker then overwrites its best/worst segments with the global vectors and
//! runs a second sweep. Barriers sit after the boundary memorise, after the
//! level-1 write and after the level-2 reduction.

mod barrier;
mod exchange;
mod worker;

use std::time::Instant;

pub use barrier::{PhaseBarrier, PoisonOnPanic, Poisoned};
pub use exchange::{level2_reduce, ExchangeRow, GlobalSolutions, MergedCandidate, SharedExchange};
pub use worker::WorkerState;

use crate::decomposition::DecompositionPlan;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::run::{RunRecord, RunTrace, StopReason, StopRule};

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub plan: DecompositionPlan,
    pub objective: Objective,
    pub max_iter: u64,
    pub target: Option<f64>,
    pub budget: Option<u64>,
    pub base_seed: u64,
    /// Run bounds and reduction checks every iteration (slower).
    pub instrument: bool,
}

impl EngineConfig {
    pub fn new(plan: DecompositionPlan, objective: Objective, max_iter: u64, base_seed: u64) -> Self {
        EngineConfig {
            plan,
            objective,
            max_iter,
            target: None,
            budget: None,
            base_seed,
            instrument: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.objective.check_arity(self.plan.bc)?;
        if self.target.is_some_and(|t| !t.is_finite()) {
            return Err(Error::Config("target fitness must be finite".into()));
        }
        if self.budget == Some(0) {
            return Err(Error::Config("evaluation budget must be positive".into()));
        }
        Ok(())
    }

    fn stop_rule(&self) -> StopRule {
        StopRule {
            max_iter: self.max_iter,
            target: self.target,
            budget: self.budget,
        }
    }

    /// Candidate evaluations after `iteration` completed iterations, in
    /// full-evaluation equivalents: a block evaluation covers `1 / nv` of the
    /// variables, so one sweep over every block costs `n`.
    pub fn evaluations_after(&self, iteration: u64) -> u64 {
        let n = self.plan.n as u64;
        n + 2 * n * iteration
    }
}

/// Results of instrumented checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub iterations_checked: u64,
    pub bounds_violations: u64,
    pub reduction_mismatches: u64,
}

#[derive(Debug, Clone)]
pub struct EngineOutcome {
    pub record: RunRecord,
    pub trace: RunTrace,
    pub stop: StopReason,
    /// Final population assembled into an `n x m` row-major matrix.
    pub population: Vec<f64>,
    /// Final block fitness, `n x nv` row-major: entry `(i, v)` is the fitness
    /// of row `i` restricted to vertical stripe `v`.
    pub block_fitness: Vec<f64>,
    pub diagnostics: Diagnostics,
    /// Raw objective calls on block slices (`nv` times the equivalent count).
    pub block_evaluations: u64,
}

struct WorkerReport {
    state: WorkerState,
    trace: RunTrace,
    stop: StopReason,
    iterations: u64,
    merge_evaluations: u64,
    diagnostics: Diagnostics,
}

/// Runs the engine to completion on `plan.threads` scoped worker threads.
pub fn run_hhcp(config: &EngineConfig) -> Result<EngineOutcome> {
    config.validate()?;
    let start = Instant::now();
    let plan = config.plan;
    let barrier = PhaseBarrier::new(plan.threads);
    let exchange = SharedExchange::new(plan.threads, plan.bc);

    let joined: Vec<std::thread::Result<std::result::Result<WorkerReport, Poisoned>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..plan.threads)
            .map(|tid| {
                let (barrier, exchange) = (&barrier, &exchange);
                std::thread::Builder::new()
                    .name(format!("hhcp-{tid}"))
                    .spawn_scoped(scope, move || {
                        let _guard = PoisonOnPanic(barrier);
                        worker_main(config, tid, barrier, exchange)
                    })
                    .expect("spawn worker thread")
            })
            .collect();
        handles.into_iter().map(|h| h.join()).collect()
    });

    let mut reports = Vec::with_capacity(plan.threads);
    for (tid, r) in joined.into_iter().enumerate() {
        match r {
            Ok(Ok(report)) => reports.push(report),
            Ok(Err(Poisoned)) => {}
            Err(payload) => {
                let message = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".into());
                return Err(Error::WorkerFailed { tid, message });
            }
        }
    }
    if reports.len() != plan.threads {
        return Err(Error::WorkerFailed {
            tid: 0,
            message: "barrier poisoned".into(),
        });
    }

    let merged = exchange
        .merged_best()
        .expect("every worker published a merge candidate");
    let wall_time = start.elapsed();

    let master = &reports[0];
    let block_evaluations: u64 = reports.iter().map(|r| r.state.evaluations()).sum();
    debug_assert_eq!(block_evaluations % plan.nv as u64, 0);
    let evaluations = block_evaluations / plan.nv as u64;
    let merge_evaluations: u64 = reports.iter().map(|r| r.merge_evaluations).sum();
    let mut diagnostics = Diagnostics::default();
    for r in &reports {
        diagnostics.iterations_checked = diagnostics.iterations_checked.max(r.diagnostics.iterations_checked);
        diagnostics.bounds_violations += r.diagnostics.bounds_violations;
        diagnostics.reduction_mismatches += r.diagnostics.reduction_mismatches;
    }

    let mut population = Vec::with_capacity(plan.n * plan.m);
    let mut block_fitness = vec![0.0; plan.n * plan.nv];
    for r in &reports {
        population.extend_from_slice(r.state.population());
        let rows = plan.worker_rows(r.state.tid());
        let local_rows = rows.len();
        for v in 0..plan.nv {
            for (li, gi) in rows.clone().enumerate() {
                block_fitness[gi * plan.nv + v] = r.state.fitness()[v * local_rows + li];
            }
        }
    }

    Ok(EngineOutcome {
        record: RunRecord {
            best_fitness: merged.fitness,
            best_solution: merged.solution,
            iterations: master.iterations,
            evaluations,
            merge_evaluations,
            wall_time,
            seed: config.base_seed,
        },
        trace: master.trace.clone(),
        stop: master.stop,
        population,
        block_fitness,
        diagnostics,
        block_evaluations,
    })
}

fn worker_main(
    config: &EngineConfig,
    tid: usize,
    barrier: &PhaseBarrier,
    exchange: &SharedExchange,
) -> std::result::Result<WorkerReport, Poisoned> {
    let plan = config.plan;
    let rule = config.stop_rule();
    let master = tid == 0;
    let mut state = WorkerState::seeded(plan, config.objective, tid, config.base_seed);
    let mut trace = RunTrace::default();
    let mut diagnostics = Diagnostics::default();
    let mut merge_evaluations = 0;
    let mut merged_current = false;
    let mut iteration = 0u64;

    state.local_memorize();
    let stop = loop {
        let evaluations = config.evaluations_after(iteration);
        exchange.publish_boundary(tid, state.min_block_best());
        barrier.wait()?;
        let best = exchange.boundary_min();
        if master && iteration > 0 {
            trace.push(best, evaluations);
        }

        // The block-best gate is cheap; the merge it guards costs full evaluations.
        if rule.meets_target(best) {
            let (cand, evals) = state.merge_candidate();
            merge_evaluations += evals;
            exchange.publish_merged(tid, cand);
            barrier.wait()?;
            merged_current = true;
            if rule.meets_target(exchange.merged_best_fitness()) {
                trace.target_iteration = Some(iteration);
                break StopReason::Target;
            }
        }
        if let Some(reason) = rule.exhausted(iteration, evaluations) {
            break reason;
        }
        merged_current = false;

        state.parallel_block_update();
        state.local_memorize();
        exchange.write_row(tid, |row| state.level1_reduce(row));
        if config.instrument {
            exchange.publish_block_table(tid, state.block_best_fitness());
            if !state.within_bounds() {
                diagnostics.bounds_violations += 1;
            }
        }
        barrier.wait()?;

        if master {
            let global = exchange.reduce_global();
            if config.instrument && global != exchange.block_table_min() {
                diagnostics.reduction_mismatches += 1;
            }
        }
        barrier.wait()?;

        exchange.with_global(|g| state.copy_global(g));
        state.parallel_block_update();
        if config.instrument {
            diagnostics.iterations_checked += 1;
            if !state.within_bounds() {
                diagnostics.bounds_violations += 1;
            }
        }
        iteration += 1;
        state.local_memorize();
    };

    if !merged_current {
        let (cand, evals) = state.merge_candidate();
        merge_evaluations += evals;
        exchange.publish_merged(tid, cand);
    }
    // Nobody reads merge slots after this point; the join orders the final reads.
    Ok(WorkerReport {
        state,
        trace,
        stop,
        iterations: iteration,
        merge_evaluations,
        diagnostics,
    })
}
