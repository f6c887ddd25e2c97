//! Repeated seeded runs over a list of thread counts.

use std::fmt;
use std::str::FromStr;

use hyperjaya_core::engine::Diagnostics;
use hyperjaya_core::run::StopReason;
use hyperjaya_core::{
    run_hhcp, run_sequential, summarize, DecompositionPlan, EngineConfig, JayaConfig, Objective, RunRecord, RunTrace,
    StatsSummary, CONVERGENCE_MAX_ITER, CONVERGENCE_TARGET, QUALITY_BUDGET,
};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Fixed evaluation budget, report final fitness.
    Quality,
    /// Stop at the target fitness or the iteration cap.
    Convergence,
    /// Same protocol as quality; the report adds speedup over one worker.
    Timing,
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quality" => Ok(Mode::Quality),
            "convergence" => Ok(Mode::Convergence),
            "timing" => Ok(Mode::Timing),
            _ => Err(HarnessError::Config(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Quality => "quality",
            Mode::Convergence => "convergence",
            Mode::Timing => "timing",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Hhcp,
    Sequential,
}

impl FromStr for EngineKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hhcp" => Ok(EngineKind::Hhcp),
            "sequential" => Ok(EngineKind::Sequential),
            _ => Err(HarnessError::Config(format!("unknown engine `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub function: Objective,
    pub n: usize,
    pub m: usize,
    pub threads: Vec<usize>,
    pub conf_h: usize,
    pub conf_v: usize,
    pub max_iter: u64,
    pub target: Option<f64>,
    pub budget: Option<u64>,
    pub repeats: u32,
    pub base_seed: u64,
    pub mode: Mode,
    pub engine: EngineKind,
    /// Enable per-iteration bounds and reduction checks in the engine.
    pub instrument: bool,
}

impl ExperimentSpec {
    /// Spec with the protocol defaults of `mode`: a 128000-evaluation budget
    /// for quality/timing, target 1e-7 with a 10000-iteration cap for convergence.
    pub fn new(
        function: Objective,
        n: usize,
        m: usize,
        threads: Vec<usize>,
        conf_h: usize,
        conf_v: usize,
        mode: Mode,
    ) -> Self {
        let (max_iter, target, budget) = match mode {
            Mode::Quality | Mode::Timing => (u64::MAX, None, Some(QUALITY_BUDGET)),
            Mode::Convergence => (CONVERGENCE_MAX_ITER, Some(CONVERGENCE_TARGET), None),
        };
        ExperimentSpec {
            function,
            n,
            m,
            threads,
            conf_h,
            conf_v,
            max_iter,
            target,
            budget,
            repeats: 20,
            base_seed: 0,
            mode,
            engine: EngineKind::Hhcp,
            instrument: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(HarnessError::Config("repeats must be at least 1".into()));
        }
        if self.threads.is_empty() || self.threads.contains(&0) {
            return Err(HarnessError::Config("thread counts must be positive".into()));
        }
        if self.n == 0 || self.m == 0 {
            return Err(HarnessError::Config("n and m must be positive".into()));
        }
        if self.target.is_some_and(|t| !t.is_finite()) {
            return Err(HarnessError::Config("target must be finite".into()));
        }
        if self.budget == Some(0) {
            return Err(HarnessError::Config("budget must be positive".into()));
        }
        if self.max_iter == u64::MAX && self.budget.is_none() && self.target.is_none() {
            return Err(HarnessError::Config(
                "no stopping condition: set --max-iter, --budget or --target".into(),
            ));
        }
        Ok(())
    }

    /// Threshold used for the success rate.
    pub fn success_threshold(&self) -> f64 {
        self.target.unwrap_or(CONVERGENCE_TARGET)
    }

    /// Thread counts actually run (the sequential engine always uses one).
    pub fn thread_counts(&self) -> Vec<usize> {
        match self.engine {
            EngineKind::Hhcp => self.threads.clone(),
            EngineKind::Sequential => vec![1],
        }
    }

    pub fn seed(&self, repeat: u32) -> u64 {
        self.base_seed.wrapping_add(repeat as u64)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub repeat: u32,
    pub record: RunRecord,
    pub trace: RunTrace,
    pub stop: StopReason,
    /// Engine checks, present for instrumented HHCP runs.
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub threads: usize,
    pub conf_h: usize,
    pub conf_v: usize,
    /// `Err` for configurations that cannot be decomposed (asterisk cells).
    pub outcome: std::result::Result<CellRuns, hyperjaya_core::Error>,
}

#[derive(Debug, Clone)]
pub struct CellRuns {
    pub plan: Option<DecompositionPlan>,
    pub runs: Vec<RunResult>,
    pub summary: StatsSummary,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub cells: Vec<CellResult>,
}

impl ExperimentReport {
    pub fn valid_cells(&self) -> impl Iterator<Item = (&CellResult, &CellRuns)> {
        self.cells
            .iter()
            .filter_map(|c| c.outcome.as_ref().ok().map(|r| (c, r)))
    }
}

/// Runs every thread count in turn; cells with invalid plans are kept as errors.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    if spec.engine == EngineKind::Sequential {
        spec.function.check_arity(spec.m)?;
    }
    let cells = spec
        .thread_counts()
        .into_iter()
        .map(|threads| run_cell(spec, threads))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        spec: spec.clone(),
        cells,
    })
}

fn run_cell(spec: &ExperimentSpec, threads: usize) -> Result<CellResult> {
    let (conf_h, conf_v) = match spec.engine {
        EngineKind::Hhcp => (spec.conf_h, spec.conf_v),
        EngineKind::Sequential => (1, 1),
    };
    let plan = match spec.engine {
        EngineKind::Sequential => None,
        EngineKind::Hhcp => {
            match DecompositionPlan::for_objective(spec.n, spec.m, threads, conf_h, conf_v, spec.function) {
                Ok(p) => Some(p),
                Err(e) if e.is_plan_error() => {
                    return Ok(CellResult {
                        threads,
                        conf_h,
                        conf_v,
                        outcome: Err(e),
                    })
                }
                Err(e) => return Err(e.into()),
            }
        }
    };

    let mut runs = Vec::with_capacity(spec.repeats as usize);
    for repeat in 0..spec.repeats {
        let seed = spec.seed(repeat);
        let (record, trace, stop, diagnostics) = match plan {
            Some(plan) => {
                let cfg = EngineConfig {
                    plan,
                    objective: spec.function,
                    max_iter: spec.max_iter,
                    target: spec.target,
                    budget: spec.budget,
                    base_seed: seed,
                    instrument: spec.instrument,
                };
                let out = run_hhcp(&cfg)?;
                let diagnostics = spec.instrument.then_some(out.diagnostics);
                (out.record, out.trace, out.stop, diagnostics)
            }
            None => {
                let cfg = JayaConfig {
                    max_iter: spec.max_iter,
                    target: spec.target,
                    budget: spec.budget,
                };
                let (record, trace) = run_sequential(spec.function, spec.n, spec.m, &cfg, seed)?;
                let stop = if trace.target_iteration.is_some() {
                    StopReason::Target
                } else if record.iterations >= spec.max_iter {
                    StopReason::MaxIterations
                } else {
                    StopReason::Budget
                };
                (record, trace, stop, None)
            }
        };
        runs.push(RunResult {
            repeat,
            record,
            trace,
            stop,
            diagnostics,
        });
    }
    let records: Vec<RunRecord> = runs.iter().map(|r| r.record.clone()).collect();
    let summary = summarize(&records, spec.success_threshold())?;
    Ok(CellResult {
        threads,
        conf_h,
        conf_v,
        outcome: Ok(CellRuns { plan, runs, summary }),
    })
}
