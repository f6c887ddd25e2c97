//! Sequential Jaya.
//!
//! Each iteration memorises the best and worst rows of the population and
//! moves every candidate towards the best and away from the worst:
//!
//! ```text
//! x' = x + r1 * (best - |x|) - r2 * (worst - |x|)
//! ```
//!
//! A fresh `(r1, r2)` pair is drawn per element, `r1` first. Proposals are
//! clamped into the box and replace the row only when strictly better.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::objective::{Bounds, Objective};
use crate::rng::{RngStream, UniformSource};
use crate::run::{RunRecord, RunTrace, StopRule};

/// `n x m` candidate matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    bounds: Bounds,
}

impl Population {
    pub fn from_rows(rows: Vec<Vec<f64>>, bounds: Bounds) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Config("population must be a non-empty rectangle".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|&v| !bounds.contains(v)) {
            return Err(Error::Config("population entry outside bounds".into()));
        }
        Ok(Population {
            rows: n,
            cols: m,
            data,
            bounds,
        })
    }

    pub fn size(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.cols
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn within_bounds(&self) -> bool {
        self.data.iter().all(|&v| self.bounds.contains(v))
    }
}

/// Objective wrapper that counts calls.
#[derive(Debug, Clone)]
pub struct Evaluator {
    objective: Objective,
    count: u64,
}

impl Evaluator {
    pub fn new(objective: Objective) -> Self {
        Evaluator { objective, count: 0 }
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    #[inline]
    pub fn eval(&mut self, x: &[f64]) -> f64 {
        self.count += 1;
        self.objective.value(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestWorst {
    pub best: Vec<f64>,
    pub worst: Vec<f64>,
    pub best_fitness: f64,
    pub worst_fitness: f64,
}

#[derive(Debug, Clone)]
pub struct JayaConfig {
    pub max_iter: u64,
    pub target: Option<f64>,
    pub budget: Option<u64>,
}

impl JayaConfig {
    pub fn iterations(max_iter: u64) -> Self {
        JayaConfig {
            max_iter,
            target: None,
            budget: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target.is_some_and(|t| !t.is_finite()) {
            return Err(Error::Config("target fitness must be finite".into()));
        }
        if self.budget == Some(0) {
            return Err(Error::Config("evaluation budget must be positive".into()));
        }
        Ok(())
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            max_iter: self.max_iter,
            target: self.target,
            budget: self.budget,
        }
    }
}

/// Uniform initialisation inside the box, drawn row by row.
pub fn init_population<R: UniformSource>(n: usize, m: usize, bounds: Bounds, rng: &mut R) -> Result<Population> {
    if n == 0 || m == 0 {
        return Err(Error::Config(format!("population shape {n}x{m} is empty")));
    }
    let bounds = Bounds::new(bounds.lower, bounds.upper)?;
    let mut data = vec![0.0; n * m];
    fill_uniform(&mut data, bounds, rng);
    Ok(Population {
        rows: n,
        cols: m,
        data,
        bounds,
    })
}

pub(crate) fn fill_uniform<R: UniformSource>(out: &mut [f64], bounds: Bounds, rng: &mut R) {
    let width = bounds.width();
    for v in out {
        // Guard against rounding past the upper end.
        *v = bounds.clamp(bounds.lower + rng.next_uniform() * width);
    }
}

pub fn evaluate_population(pop: &Population, eval: &mut Evaluator) -> Result<Vec<f64>> {
    eval.objective().check_arity(pop.dim())?;
    Ok(pop.rows().map(|row| eval.eval(row)).collect())
}

/// Indices of the first minimum and first maximum under strict comparisons.
pub fn best_worst_indices(fitness: &[f64]) -> Option<(usize, usize)> {
    let (mut best, mut worst) = (0, 0);
    for (i, &f) in fitness.iter().enumerate().skip(1) {
        if f < fitness[best] {
            best = i;
        }
        if f > fitness[worst] {
            worst = i;
        }
    }
    (!fitness.is_empty()).then_some((best, worst))
}

pub fn memorize_best_worst(pop: &Population, fitness: &[f64]) -> Result<BestWorst> {
    if fitness.len() != pop.size() {
        return Err(Error::Usage(format!(
            "fitness vector has {} entries for {} candidates",
            fitness.len(),
            pop.size()
        )));
    }
    let (b, w) = best_worst_indices(fitness).ok_or_else(|| Error::Usage("empty population".into()))?;
    Ok(BestWorst {
        best: pop.row(b).to_vec(),
        worst: pop.row(w).to_vec(),
        best_fitness: fitness[b],
        worst_fitness: fitness[w],
    })
}

/// Writes the clamped move of `current` into `out`.
#[inline]
pub fn propose<R: UniformSource>(
    current: &[f64],
    best: &[f64],
    worst: &[f64],
    bounds: Bounds,
    rng: &mut R,
    out: &mut [f64],
) {
    for (((o, &x), &b), &w) in out.iter_mut().zip(current).zip(best).zip(worst) {
        let r1 = rng.next_uniform();
        let r2 = rng.next_uniform();
        let ax = x.abs();
        *o = bounds.clamp(x + r1 * (b - ax) - r2 * (w - ax));
    }
}

/// One greedy update sweep. Returns the number of accepted replacements.
pub fn update_population<R: UniformSource>(
    pop: &mut Population,
    fitness: &mut [f64],
    bw: &BestWorst,
    eval: &mut Evaluator,
    rng: &mut R,
) -> usize {
    let bounds = pop.bounds;
    let mut candidate = vec![0.0; pop.dim()];
    let mut accepted = 0;
    for (i, fv) in fitness.iter_mut().enumerate() {
        propose(pop.row(i), &bw.best, &bw.worst, bounds, rng, &mut candidate);
        let f = eval.eval(&candidate);
        if f < *fv {
            pop.row_mut(i).copy_from_slice(&candidate);
            *fv = f;
            accepted += 1;
        }
    }
    accepted
}

/// Full sequential run: init, evaluate, then memorise/update until a stop condition fires.
pub fn run_sequential(
    objective: Objective,
    n: usize,
    m: usize,
    config: &JayaConfig,
    seed: u64,
) -> Result<(RunRecord, RunTrace)> {
    config.validate()?;
    objective.check_arity(m)?;
    let start = Instant::now();
    let mut rng = RngStream::new(seed);
    let mut eval = Evaluator::new(objective);
    let mut pop = init_population(n, m, objective.bounds(), &mut rng)?;
    let mut fitness = evaluate_population(&pop, &mut eval)?;
    let rule = config.stop_rule();
    let mut trace = RunTrace::default();
    let mut iteration = 0;

    loop {
        let bw = memorize_best_worst(&pop, &fitness)?;
        if rule.meets_target(bw.best_fitness) {
            trace.target_iteration = Some(iteration);
            break;
        }
        if rule.exhausted(iteration, eval.count()).is_some() {
            break;
        }
        update_population(&mut pop, &mut fitness, &bw, &mut eval, &mut rng);
        iteration += 1;
        let best = fitness.iter().copied().fold(f64::INFINITY, f64::min);
        trace.push(best, eval.count());
    }

    let bw = memorize_best_worst(&pop, &fitness)?;
    let record = RunRecord {
        best_fitness: bw.best_fitness,
        best_solution: bw.best,
        iterations: iteration,
        evaluations: eval.count(),
        merge_evaluations: 0,
        wall_time: start.elapsed(),
        seed,
    };
    Ok((record, trace))
}
