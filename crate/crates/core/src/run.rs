use std::time::Duration;

/// Outcome of one optimisation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub best_fitness: f64,
    pub best_solution: Vec<f64>,
    pub iterations: u64,
    /// Candidate evaluations charged against the budget.
    pub evaluations: u64,
    /// Full-solution evaluations spent merging block bests (not charged to the budget).
    pub merge_evaluations: u64,
    pub wall_time: Duration,
    pub seed: u64,
}

/// Per-iteration history of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    /// Best fitness after each completed iteration.
    pub best_fitness: Vec<f64>,
    /// Cumulative candidate evaluations after each completed iteration.
    pub evaluations: Vec<u64>,
    /// First iteration whose state met the target, if any.
    pub target_iteration: Option<u64>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.best_fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best_fitness.is_empty()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.best_fitness.windows(2).all(|w| w[1] <= w[0])
    }

    pub(crate) fn push(&mut self, best: f64, evaluations: u64) {
        self.best_fitness.push(best);
        self.evaluations.push(evaluations);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    Target,
    Budget,
}

/// Stopping conditions shared by both optimisers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_iter: u64,
    pub target: Option<f64>,
    pub budget: Option<u64>,
}

impl StopRule {
    /// Iteration-count and budget checks. The target is checked separately
    /// because the engine needs a merge before it can decide.
    pub fn exhausted(&self, iteration: u64, evaluations: u64) -> Option<StopReason> {
        if iteration >= self.max_iter {
            Some(StopReason::MaxIterations)
        } else if self.budget.is_some_and(|b| evaluations >= b) {
            Some(StopReason::Budget)
        } else {
            None
        }
    }

    pub fn meets_target(&self, fitness: f64) -> bool {
        self.target.is_some_and(|t| fitness < t)
    }
}
