//! Per-worker state and the block-level Jaya steps.
//!
//! Storage follows the decomposition layout: a `(conf_h * br) x m` slab, a
//! `nv x (conf_h * br)` fitness matrix and `conf_h x m` best/worst matrices.
//! Block `(s, v)` covers slab rows `s*br..(s+1)*br` and columns `v*bc..(v+1)*bc`.

use crate::decomposition::DecompositionPlan;
use crate::jaya::{best_worst_indices, fill_uniform, propose};
use crate::objective::{Bounds, Objective};
use crate::rng::{RngStream, UniformSource};

use super::exchange::{ExchangeRow, GlobalSolutions, MergedCandidate};

#[derive(Debug, Clone)]
pub struct WorkerState<S = RngStream> {
    tid: usize,
    plan: DecompositionPlan,
    objective: Objective,
    bounds: Bounds,
    population: Vec<f64>,
    fitness: Vec<f64>,
    local_best: Vec<f64>,
    local_worst: Vec<f64>,
    best_fitness: Vec<f64>,
    worst_fitness: Vec<f64>,
    streams: Vec<S>,
    evaluations: u64,
    scratch: Vec<f64>,
}

impl WorkerState<RngStream> {
    /// Worker `tid` with one stream per owned block, seeded from the global block id.
    pub fn seeded(plan: DecompositionPlan, objective: Objective, tid: usize, base_seed: u64) -> Self {
        let streams = (0..plan.conf_h)
            .flat_map(|s| (0..plan.nv).map(move |v| (s, v)))
            .map(|(s, v)| RngStream::for_subpopulation(base_seed, plan.subpop_id(tid, s, v)))
            .collect();
        Self::with_streams(plan, objective, tid, streams)
    }
}

impl<S: UniformSource> WorkerState<S> {
    /// Initialises and evaluates every owned block from its own stream.
    /// `streams` is indexed `s * nv + v`.
    pub fn with_streams(plan: DecompositionPlan, objective: Objective, tid: usize, streams: Vec<S>) -> Self {
        assert_eq!(streams.len(), plan.l, "one stream per owned block");
        assert!(tid < plan.threads);
        let rows = plan.conf_h * plan.br;
        let mut w = WorkerState {
            tid,
            plan,
            objective,
            bounds: objective.bounds(),
            population: vec![0.0; rows * plan.m],
            fitness: vec![0.0; plan.nv * rows],
            local_best: vec![0.0; plan.conf_h * plan.m],
            local_worst: vec![0.0; plan.conf_h * plan.m],
            best_fitness: vec![f64::INFINITY; plan.l],
            worst_fitness: vec![f64::NEG_INFINITY; plan.l],
            streams,
            evaluations: 0,
            scratch: vec![0.0; plan.bc],
        };
        w.initialize();
        w
    }

    fn initialize(&mut self) {
        let DecompositionPlan {
            br, bc, m, nv, conf_h, ..
        } = self.plan;
        for s in 0..conf_h {
            for v in 0..nv {
                let stream = &mut self.streams[s * nv + v];
                for i in s * br..(s + 1) * br {
                    let seg = &mut self.population[i * m + v * bc..i * m + (v + 1) * bc];
                    fill_uniform(seg, self.bounds, stream);
                }
                for i in s * br..(s + 1) * br {
                    let seg = &self.population[i * m + v * bc..i * m + (v + 1) * bc];
                    self.fitness[v * conf_h * br + i] = self.objective.value(seg);
                    self.evaluations += 1;
                }
            }
        }
    }

    pub fn tid(&self) -> usize {
        self.tid
    }

    pub fn plan(&self) -> &DecompositionPlan {
        &self.plan
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// The local slab, `(conf_h * br) x m` row-major.
    pub fn population(&self) -> &[f64] {
        &self.population
    }

    /// The local fitness matrix, `nv x (conf_h * br)` row-major.
    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn local_best(&self) -> &[f64] {
        &self.local_best
    }

    pub fn local_worst(&self) -> &[f64] {
        &self.local_worst
    }

    /// Block-best fitness values indexed `s * nv + v`.
    pub fn block_best_fitness(&self) -> &[f64] {
        &self.best_fitness
    }

    pub fn block_worst_fitness(&self) -> &[f64] {
        &self.worst_fitness
    }

    pub fn block_rows(&self, s: usize, v: usize) -> Vec<Vec<f64>> {
        let DecompositionPlan { br, bc, m, .. } = self.plan;
        (s * br..(s + 1) * br)
            .map(|i| self.population[i * m + v * bc..i * m + (v + 1) * bc].to_vec())
            .collect()
    }

    pub fn block_fitness(&self, s: usize, v: usize) -> &[f64] {
        let DecompositionPlan { br, conf_h, .. } = self.plan;
        let start = v * conf_h * br + s * br;
        &self.fitness[start..start + br]
    }

    pub fn block_best(&self, s: usize, v: usize) -> &[f64] {
        let DecompositionPlan { bc, m, .. } = self.plan;
        &self.local_best[s * m + v * bc..s * m + (v + 1) * bc]
    }

    pub fn block_worst(&self, s: usize, v: usize) -> &[f64] {
        let DecompositionPlan { bc, m, .. } = self.plan;
        &self.local_worst[s * m + v * bc..s * m + (v + 1) * bc]
    }

    pub fn min_block_best(&self) -> f64 {
        self.best_fitness.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn within_bounds(&self) -> bool {
        self.population.iter().all(|&x| self.bounds.contains(x))
    }

    /// Best/worst scan on every owned block, first occurrence on ties.
    pub fn local_memorize(&mut self) {
        let DecompositionPlan {
            br, bc, m, nv, conf_h, ..
        } = self.plan;
        for s in 0..conf_h {
            for v in 0..nv {
                let start = v * conf_h * br + s * br;
                let column = &self.fitness[start..start + br];
                let (b, w) = best_worst_indices(column).expect("br >= 1");
                let seg = s * m + v * bc..s * m + (v + 1) * bc;
                let brow = (s * br + b) * m + v * bc;
                let wrow = (s * br + w) * m + v * bc;
                self.local_best[seg.clone()].copy_from_slice(&self.population[brow..brow + bc]);
                self.local_worst[seg].copy_from_slice(&self.population[wrow..wrow + bc]);
                self.best_fitness[s * nv + v] = column[b];
                self.worst_fitness[s * nv + v] = column[w];
            }
        }
    }

    /// One update sweep over every owned block against the current
    /// `localbest` / `localworst` segments. Returns accepted replacements.
    pub fn parallel_block_update(&mut self) -> usize {
        let DecompositionPlan {
            br, bc, m, nv, conf_h, ..
        } = self.plan;
        let WorkerState {
            population,
            fitness,
            local_best,
            local_worst,
            streams,
            scratch,
            objective,
            bounds,
            evaluations,
            ..
        } = self;
        let mut accepted = 0;
        for s in 0..conf_h {
            for v in 0..nv {
                let seg = s * m + v * bc..s * m + (v + 1) * bc;
                let best = &local_best[seg.clone()];
                let worst = &local_worst[seg];
                let stream = &mut streams[s * nv + v];
                for i in s * br..(s + 1) * br {
                    let row = &mut population[i * m + v * bc..i * m + (v + 1) * bc];
                    propose(row, best, worst, *bounds, stream, scratch);
                    let f = objective.value(scratch);
                    *evaluations += 1;
                    let cell = &mut fitness[v * conf_h * br + i];
                    if f < *cell {
                        row.copy_from_slice(scratch);
                        *cell = f;
                        accepted += 1;
                    }
                }
            }
        }
        accepted
    }

    /// Level-1 reduction over owned blocks in `(s, v)` order.
    pub fn level1_reduce(&self, out: &mut ExchangeRow) {
        let nv = self.plan.nv;
        let (b, _) = best_worst_indices(&self.best_fitness).expect("l >= 1");
        let (_, w) = best_worst_indices(&self.worst_fitness).expect("l >= 1");
        out.best.copy_from_slice(self.block_best(b / nv, b % nv));
        out.best_fitness = self.best_fitness[b];
        out.worst.copy_from_slice(self.block_worst(w / nv, w % nv));
        out.worst_fitness = self.worst_fitness[w];
    }

    /// Overwrites every block segment of `localbest` / `localworst` with the global vectors.
    pub fn copy_global(&mut self, global: &GlobalSolutions) {
        let bc = self.plan.bc;
        for seg in self.local_best.chunks_exact_mut(bc) {
            seg.copy_from_slice(&global.best);
        }
        for seg in self.local_worst.chunks_exact_mut(bc) {
            seg.copy_from_slice(&global.worst);
        }
    }

    /// Evaluates each `localbest` row as a full solution and returns the
    /// best one (first row on ties) with the number of evaluations spent.
    pub fn merge_candidate(&self) -> (MergedCandidate, u64) {
        let m = self.plan.m;
        let mut best: Option<MergedCandidate> = None;
        for row in self.local_best.chunks_exact(m) {
            let f = self.objective.value(row);
            if best.as_ref().is_none_or(|b| f < b.fitness) {
                best = Some(MergedCandidate {
                    fitness: f,
                    solution: row.to_vec(),
                });
            }
        }
        (best.expect("conf_h >= 1"), self.plan.conf_h as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jaya::{memorize_best_worst, Population};
    use crate::rng::{ConstantSource, Recorder};

    fn plan(n: usize, m: usize, t: usize, ch: usize, cv: usize) -> DecompositionPlan {
        DecompositionPlan::new(n, m, t, ch, cv).unwrap()
    }

    #[test]
    fn init_evaluates_every_candidate() {
        let p = plan(8, 8, 2, 2, 2);
        let w = WorkerState::seeded(p, Objective::Sphere, 1, 3);
        assert_eq!(w.evaluations(), (p.conf_h * p.br * p.nv) as u64);
        assert!(w.within_bounds());
        for s in 0..p.conf_h {
            for v in 0..p.nv {
                for (row, f) in w.block_rows(s, v).iter().zip(w.block_fitness(s, v)) {
                    assert_eq!(Objective::Sphere.value(row), *f);
                }
            }
        }
    }

    #[test]
    fn memorize_matches_per_block_jaya() {
        for f in Objective::ALL {
            let p = plan(8, 16, 2, 2, 2);
            let mut w = WorkerState::seeded(p, f, 0, 9);
            w.local_memorize();
            for s in 0..p.conf_h {
                for v in 0..p.nv {
                    let pop = Population::from_rows(w.block_rows(s, v), f.bounds()).unwrap();
                    let bw = memorize_best_worst(&pop, w.block_fitness(s, v)).unwrap();
                    assert_eq!(w.block_best(s, v), &bw.best[..]);
                    assert_eq!(w.block_worst(s, v), &bw.worst[..]);
                    assert_eq!(w.block_best_fitness()[s * p.nv + v], bw.best_fitness);
                    assert_eq!(w.block_worst_fitness()[s * p.nv + v], bw.worst_fitness);
                }
            }
        }
    }

    #[test]
    fn memorize_ties_pick_first() {
        // A zero stream puts every entry on the lower bound, so all fitnesses tie.
        let p = plan(3, 2, 1, 1, 1);
        let mut w = WorkerState::with_streams(p, Objective::Sphere, 0, vec![ConstantSource(0.0)]);
        w.local_memorize();
        assert_eq!(w.block_best_fitness()[0], w.block_worst_fitness()[0]);
        assert_eq!(w.block_best(0, 0), &w.population()[0..2]);
    }

    #[test]
    fn zero_streams_accept_nothing() {
        let p = plan(4, 4, 1, 2, 2);
        let streams = vec![ConstantSource(0.0); p.l];
        let mut w = WorkerState::with_streams(p, Objective::Rastrigin, 0, streams);
        w.local_memorize();
        let before = w.population().to_vec();
        assert_eq!(w.parallel_block_update(), 0);
        assert_eq!(w.population(), &before[..]);
    }

    #[test]
    fn block_update_matches_transcription() {
        let p = plan(2, 2, 1, 1, 1);
        let f = Objective::Griewank;
        let rec = Recorder::new(RngStream::new(1234));
        let mut w = WorkerState::with_streams(p, f, 0, vec![rec]);
        w.local_memorize();
        let x0 = w.population().to_vec();
        let fv0 = w.fitness().to_vec();
        let best = w.local_best().to_vec();
        let worst = w.local_worst().to_vec();
        let skip = w.streams[0].tape.len();
        w.parallel_block_update();
        let tape = &w.streams[0].tape[skip..];
        assert_eq!(tape.len(), 8);

        let (lo, hi) = (f.bounds().lower, f.bounds().upper);
        let mut x = x0.clone();
        let mut fv = fv0.clone();
        let mut k = 0;
        for i in 0..2 {
            let mut xnew = [0.0; 2];
            for j in 0..2 {
                let xij = x0[i * 2 + j];
                let v = xij + tape[k] * (best[j] - xij.abs()) - tape[k + 1] * (worst[j] - xij.abs());
                k += 2;
                xnew[j] = v.max(lo).min(hi);
            }
            let fnew = f.evaluate(&xnew).unwrap();
            if fnew < fv[i] {
                x[i * 2..i * 2 + 2].copy_from_slice(&xnew);
                fv[i] = fnew;
            }
        }
        assert_eq!(w.population(), &x[..]);
        assert_eq!(w.fitness(), &fv[..]);
    }

    #[test]
    fn sweep_never_worsens_block_best() {
        let p = plan(16, 32, 2, 2, 4);
        let mut w = WorkerState::seeded(p, Objective::Ackley, 1, 5);
        w.local_memorize();
        for _ in 0..20 {
            let before = w.block_best_fitness().to_vec();
            w.parallel_block_update();
            w.local_memorize();
            assert!(w.block_best_fitness().iter().zip(&before).all(|(a, b)| a <= b));
            assert!(w.within_bounds());
        }
    }

    #[test]
    fn level1_examples() {
        let p = plan(2, 4, 1, 1, 2);
        let mut w = WorkerState::seeded(p, Objective::Sphere, 0, 0);
        w.local_memorize();
        w.best_fitness.copy_from_slice(&[2.0, 1.5]);
        w.worst_fitness.copy_from_slice(&[7.0, 3.0]);
        let mut row = ExchangeRow::empty(p.bc);
        w.level1_reduce(&mut row);
        assert_eq!(row.best, w.block_best(0, 1));
        assert_eq!(row.best_fitness, 1.5);
        assert_eq!(row.worst, w.block_worst(0, 0));
        assert_eq!(row.worst_fitness, 7.0);

        let p = plan(4, 4, 1, 1, 1);
        let mut w = WorkerState::seeded(p, Objective::Sphere, 0, 0);
        w.local_memorize();
        w.level1_reduce(&mut row_for(&p, &w));
    }

    fn row_for<S: UniformSource>(p: &DecompositionPlan, w: &WorkerState<S>) -> ExchangeRow {
        let mut row = ExchangeRow::empty(p.bc);
        w.level1_reduce(&mut row);
        assert_eq!(row.best, w.block_best(0, 0));
        assert_eq!(row.worst, w.block_worst(0, 0));
        row
    }

    #[test]
    fn level1_matches_brute_force() {
        let p = plan(8, 16, 1, 2, 4);
        let mut w = WorkerState::seeded(p, Objective::Sphere, 0, 0);
        w.local_memorize();
        let mut rng = RngStream::new(77);
        let mut row = ExchangeRow::empty(p.bc);
        for _ in 0..1000 {
            for x in w.best_fitness.iter_mut().chain(w.worst_fitness.iter_mut()) {
                *x = (rng.next_uniform() * 3.0).floor();
            }
            w.level1_reduce(&mut row);
            let min = w.best_fitness.iter().copied().fold(f64::INFINITY, f64::min);
            let max = w.worst_fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let b = w.best_fitness.iter().position(|&x| x == min).unwrap();
            let k = w.worst_fitness.iter().position(|&x| x == max).unwrap();
            assert_eq!(row.best, w.block_best(b / p.nv, b % p.nv));
            assert_eq!(row.worst, w.block_worst(k / p.nv, k % p.nv));
        }
    }

    #[test]
    fn merge_concatenates_segments() {
        let p = plan(4, 4, 1, 1, 2);
        let mut w = WorkerState::seeded(p, Objective::Griewank, 0, 0);
        w.local_best.copy_from_slice(&[10.0, -20.0, 30.0, 5.0]);
        let (c, evals) = w.merge_candidate();
        assert_eq!(evals, 1);
        assert_eq!(c.solution, vec![10.0, -20.0, 30.0, 5.0]);
        let direct = Objective::Griewank.evaluate(&[10.0, -20.0, 30.0, 5.0]).unwrap();
        assert_eq!(c.fitness, direct);
        let per_block = Objective::Griewank.value(&[10.0, -20.0]) + Objective::Griewank.value(&[30.0, 5.0]);
        assert_ne!(direct, per_block);

        w.local_best.fill(0.0);
        let mut s = WorkerState::seeded(p, Objective::Sphere, 0, 0);
        s.local_best.fill(0.0);
        assert_eq!(s.merge_candidate().0.fitness, 0.0);
    }

    #[test]
    fn copy_global_tiles_segments() {
        let p = plan(4, 6, 1, 2, 3);
        let mut w = WorkerState::seeded(p, Objective::Sphere, 0, 0);
        let g = ExchangeRow {
            best: vec![1.0, 2.0],
            best_fitness: 5.0,
            worst: vec![3.0, 4.0],
            worst_fitness: 25.0,
        };
        w.copy_global(&g);
        for s in 0..p.conf_h {
            for v in 0..p.nv {
                assert_eq!(w.block_best(s, v), &[1.0, 2.0]);
                assert_eq!(w.block_worst(s, v), &[3.0, 4.0]);
            }
        }
    }
}
