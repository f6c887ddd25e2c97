//! Shared cooperation buffers.
//!
//! Each worker owns one row of `localbest_thread` / `localworst_thread` and
//! writes it between barriers; worker 0 alone reduces the rows into the
//! global best/worst block vectors.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

/// One worker's level-1 result.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeRow {
    pub best: Vec<f64>,
    pub best_fitness: f64,
    pub worst: Vec<f64>,
    pub worst_fitness: f64,
}

impl ExchangeRow {
    pub fn empty(bc: usize) -> Self {
        ExchangeRow {
            best: vec![0.0; bc],
            best_fitness: f64::INFINITY,
            worst: vec![0.0; bc],
            worst_fitness: f64::NEG_INFINITY,
        }
    }
}

/// `globalbest` / `globalworst` and their fitness values.
pub type GlobalSolutions = ExchangeRow;

/// A merged full-length candidate published by one worker.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedCandidate {
    pub fitness: f64,
    pub solution: Vec<f64>,
}

/// Level-2 reduction: first row with minimum best fitness, first row with
/// maximum worst fitness, scanning in increasing worker id.
pub fn level2_reduce(rows: &[ExchangeRow]) -> GlobalSolutions {
    let mut b = 0;
    let mut w = 0;
    for (i, r) in rows.iter().enumerate().skip(1) {
        if r.best_fitness < rows[b].best_fitness {
            b = i;
        }
        if r.worst_fitness > rows[w].worst_fitness {
            w = i;
        }
    }
    ExchangeRow {
        best: rows[b].best.clone(),
        best_fitness: rows[b].best_fitness,
        worst: rows[w].worst.clone(),
        worst_fitness: rows[w].worst_fitness,
    }
}

#[derive(Debug)]
pub struct SharedExchange {
    rows: Vec<Mutex<ExchangeRow>>,
    global: RwLock<GlobalSolutions>,
    boundary: Vec<AtomicU64>,
    merged: Vec<Mutex<Option<MergedCandidate>>>,
    block_tables: Vec<Mutex<Vec<f64>>>,
}

impl SharedExchange {
    pub fn new(threads: usize, bc: usize) -> Self {
        SharedExchange {
            rows: (0..threads).map(|_| Mutex::new(ExchangeRow::empty(bc))).collect(),
            global: RwLock::new(ExchangeRow::empty(bc)),
            boundary: (0..threads).map(|_| AtomicU64::new(f64::INFINITY.to_bits())).collect(),
            merged: (0..threads).map(|_| Mutex::new(None)).collect(),
            block_tables: (0..threads).map(|_| Mutex::new(Vec::new())).collect(),
        }
    }

    pub fn threads(&self) -> usize {
        self.rows.len()
    }

    pub fn write_row(&self, tid: usize, f: impl FnOnce(&mut ExchangeRow)) {
        f(&mut lock(&self.rows[tid]));
    }

    pub fn rows_snapshot(&self) -> Vec<ExchangeRow> {
        self.rows.iter().map(|r| lock(r).clone()).collect()
    }

    /// Master-only step between the second and third barriers.
    pub fn reduce_global(&self) -> f64 {
        let rows = self.rows_snapshot();
        let g = level2_reduce(&rows);
        let fitness = g.best_fitness;
        *self.global.write().unwrap_or_else(|e| e.into_inner()) = g;
        fitness
    }

    pub fn with_global<R>(&self, f: impl FnOnce(&GlobalSolutions) -> R) -> R {
        f(&self.global.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn publish_boundary(&self, tid: usize, best: f64) {
        self.boundary[tid].store(best.to_bits(), Ordering::Release);
    }

    pub fn boundary_min(&self) -> f64 {
        self.boundary
            .iter()
            .map(|a| f64::from_bits(a.load(Ordering::Acquire)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn publish_merged(&self, tid: usize, cand: MergedCandidate) {
        *lock(&self.merged[tid]) = Some(cand);
    }

    /// Minimum merged candidate, first worker wins ties.
    pub fn merged_best(&self) -> Option<MergedCandidate> {
        let mut best: Option<MergedCandidate> = None;
        for slot in &self.merged {
            if let Some(c) = lock(slot).as_ref() {
                if best.as_ref().is_none_or(|b| c.fitness < b.fitness) {
                    best = Some(c.clone());
                }
            }
        }
        best
    }

    pub fn merged_best_fitness(&self) -> f64 {
        self.merged
            .iter()
            .filter_map(|s| lock(s).as_ref().map(|c| c.fitness))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn publish_block_table(&self, tid: usize, table: &[f64]) {
        let mut t = lock(&self.block_tables[tid]);
        t.clear();
        t.extend_from_slice(table);
    }

    pub fn block_table_min(&self) -> f64 {
        self.block_tables
            .iter()
            .flat_map(|t| lock(t).clone())
            .fold(f64::INFINITY, f64::min)
    }
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}
