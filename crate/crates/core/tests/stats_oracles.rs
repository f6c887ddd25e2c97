use std::time::Duration;

use hyperjaya_core::stats::{mean_stddev, midranks, RankSumMethod};
use hyperjaya_core::{summarize, wilcoxon_rank_sum, RngStream, RunRecord, UniformSource};

fn two_pass(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, if v.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 })
}

#[test]
fn summary_matches_two_pass() {
    let mut rng = RngStream::new(60);
    for _ in 0..50 {
        let values: Vec<f64> = (0..60).map(|_| rng.next_uniform()).collect();
        let records: Vec<RunRecord> = values
            .iter()
            .map(|&f| RunRecord {
                best_fitness: f,
                best_solution: vec![],
                iterations: 0,
                evaluations: 0,
                merge_evaluations: 0,
                wall_time: Duration::from_secs_f64(f),
                seed: 0,
            })
            .collect();
        let s = summarize(&records, 0.5).unwrap();
        let (m, sd) = two_pass(&values);
        assert!((s.mean_fitness - m).abs() <= 1e-12);
        assert!((s.stddev_fitness - sd).abs() <= 1e-12);
        let (m2, sd2) = mean_stddev(&values).unwrap();
        assert_eq!((m2, sd2), (s.mean_fitness, s.stddev_fitness));
        let frac = values.iter().filter(|&&v| v < 0.5).count() as f64 / 60.0;
        assert_eq!(s.success_rate, frac);
    }
}

/// Brute-force two-sided p: enumerate every size-|a| subset of pooled positions.
fn enumerate_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let rank = |x: f64| {
        let less = pooled.iter().filter(|&&y| y < x).count() as f64;
        let equal = pooled.iter().filter(|&&y| y == x).count() as f64;
        less + (equal + 1.0) / 2.0
    };
    let ranks: Vec<f64> = pooled.iter().map(|&x| rank(x)).collect();
    let mu = a.len() as f64 * (n as f64 + 1.0) / 2.0;
    let observed: f64 = ranks[..a.len()].iter().sum();
    let dev = (observed - mu).abs();
    let (mut total, mut extreme) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        total += 1;
        if (w - mu).abs() >= dev - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

#[test]
fn exact_rank_sum_matches_enumeration() {
    let mut rng = RngStream::new(5);
    for na in 1..=5 {
        for nb in 1..=5 {
            for trial in 0..20 {
                // Coarse grid on odd trials to force ties.
                let draw = |rng: &mut RngStream| {
                    let u = rng.next_uniform() * 10.0;
                    if trial % 2 == 1 {
                        u.floor()
                    } else {
                        u
                    }
                };
                let a: Vec<f64> = (0..na).map(|_| draw(&mut rng)).collect();
                let b: Vec<f64> = (0..nb).map(|_| draw(&mut rng)).collect();
                let t = wilcoxon_rank_sum(&a, &b).unwrap();
                let want = enumerate_p(&a, &b);
                if t.method == RankSumMethod::Degenerate {
                    assert_eq!(want, 1.0);
                }
                assert!((t.p_value - want).abs() <= 1e-9, "{a:?} {b:?}: {} vs {want}", t.p_value);
            }
        }
    }
    assert!((enumerate_p(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]) - 0.1).abs() < 1e-12);
}

#[test]
fn midranks_match_counting_definition() {
    let mut rng = RngStream::new(9);
    for _ in 0..200 {
        let v: Vec<f64> = (0..12).map(|_| (rng.next_uniform() * 5.0).floor()).collect();
        let r = midranks(&v);
        for (i, &x) in v.iter().enumerate() {
            let less = v.iter().filter(|&&y| y < x).count() as f64;
            let eq = v.iter().filter(|&&y| y == x).count() as f64;
            assert_eq!(r[i], less + (eq + 1.0) / 2.0);
        }
    }
}

#[test]
fn normal_route_agrees_with_exact_at_the_switch() {
    // At 25 + 25 both routes are available; the normal approximation should be close.
    let mut rng = RngStream::new(3);
    let a: Vec<f64> = (0..25).map(|_| rng.next_uniform()).collect();
    let b: Vec<f64> = (0..26).map(|_| rng.next_uniform() + 0.2).collect();
    let normal = wilcoxon_rank_sum(&a, &b).unwrap();
    assert_eq!(normal.method, RankSumMethod::Normal);
    let exact = wilcoxon_rank_sum(&a, &b[..25]).unwrap();
    assert_eq!(exact.method, RankSumMethod::Exact);
    assert!((normal.p_value - exact.p_value).abs() < 0.05);
}
