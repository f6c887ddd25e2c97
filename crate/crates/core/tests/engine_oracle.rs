//! With one worker and one block, an engine iteration is two sequential
//! memorise/update sweeps driven by the same stream.

use hyperjaya_core::engine::WorkerState;
use hyperjaya_core::jaya::{evaluate_population, init_population, memorize_best_worst, update_population, Evaluator};
use hyperjaya_core::rng::{subpop_seed, Recorder, Tape};
use hyperjaya_core::{run_hhcp, DecompositionPlan, EngineConfig, Objective, RngStream, UniformSource};

/// Jaya replay of `iterations` engine iterations from a recorded tape.
fn replay(f: Objective, n: usize, m: usize, tape: Vec<f64>, iterations: u64) -> (Vec<f64>, Vec<f64>, Tape) {
    let mut tape = Tape::new(tape);
    let mut eval = Evaluator::new(f);
    let mut pop = init_population(n, m, f.bounds(), &mut tape).unwrap();
    let mut fv = evaluate_population(&pop, &mut eval).unwrap();
    for _ in 0..2 * iterations {
        let bw = memorize_best_worst(&pop, &fv).unwrap();
        update_population(&mut pop, &mut fv, &bw, &mut eval, &mut tape);
    }
    (pop.as_slice().to_vec(), fv, tape)
}

fn record_tape(seed: u64, len: usize) -> Vec<f64> {
    let mut rec = Recorder::new(RngStream::new(seed));
    for _ in 0..len {
        rec.next_uniform();
    }
    rec.tape
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn single_block_engine_matches_sequential_replay() {
    let mut pick = RngStream::new(2024);
    for case in 0..100u64 {
        let f = Objective::ALL[(case % 5) as usize];
        let n = 1 + (pick.next_uniform() * 8.0) as usize;
        let m = f.min_arity().max(1 + (pick.next_uniform() * 8.0) as usize);
        let iterations = 1 + case % 3;
        let plan = DecompositionPlan::for_objective(n, m, 1, 1, 1, f).unwrap();
        let out = run_hhcp(&EngineConfig::new(plan, f, iterations, case)).unwrap();

        let draws = n * m * (1 + 4 * iterations as usize);
        let tape = record_tape(subpop_seed(case, 0), draws);
        let (pop, fv, tape) = replay(f, n, m, tape, iterations);
        assert_eq!(tape.remaining(), 0);
        assert_eq!(bits(&out.population), bits(&pop), "case {case}: {f} {n}x{m}");
        assert_eq!(bits(&out.block_fitness), bits(&fv), "case {case}");

        let best = fv.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(out.record.best_fitness, best);
    }
}

#[test]
fn worker_blocks_are_independent_of_thread_layout() {
    // Every block evolves from its own stream: initial block contents depend
    // only on (base seed, block id), not on which worker owns the block.
    let f = Objective::Rastrigin;
    let plan = DecompositionPlan::new(8, 8, 2, 2, 2).unwrap();
    for tid in 0..plan.threads {
        let w = WorkerState::seeded(plan, f, tid, 11);
        for s in 0..plan.conf_h {
            for v in 0..plan.nv {
                let id = plan.subpop_id(tid, s, v);
                let mut stream = RngStream::new(subpop_seed(11, id));
                let expect = init_population(plan.br, plan.bc, f.bounds(), &mut stream).unwrap();
                let rows: Vec<f64> = w.block_rows(s, v).concat();
                assert_eq!(rows, expect.as_slice());
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_scheduling() {
    let f = Objective::Griewank;
    let plan = DecompositionPlan::for_objective(32, 64, 8, 2, 2, f).unwrap();
    let cfg = EngineConfig::new(plan, f, 60, 99);
    let first = run_hhcp(&cfg).unwrap();
    for _ in 0..5 {
        let again = run_hhcp(&cfg).unwrap();
        assert_eq!(bits(&again.population), bits(&first.population));
        assert_eq!(again.trace, first.trace);
        assert_eq!(again.record.best_solution, first.record.best_solution);
    }
}

#[test]
fn merged_solution_is_consistent() {
    for f in Objective::ALL {
        let plan = DecompositionPlan::for_objective(16, 32, 2, 2, 2, f).unwrap();
        let out = run_hhcp(&EngineConfig::new(plan, f, 20, 5)).unwrap();
        assert_eq!(out.record.best_solution.len(), 32);
        assert_eq!(f.evaluate(&out.record.best_solution).unwrap(), out.record.best_fitness);
        let b = f.bounds();
        assert!(out.population.iter().all(|&x| b.contains(x)));
    }
}
