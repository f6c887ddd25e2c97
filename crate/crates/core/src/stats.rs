//! Run statistics: summaries, the two-sided Wilcoxon rank-sum test and speedup.

use std::collections::BTreeMap;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::run::RunRecord;

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Above this combined sample size the normal approximation is used.
pub const EXACT_RANK_SUM_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsSummary {
    pub runs: usize,
    pub mean_fitness: f64,
    pub stddev_fitness: f64,
    pub mean_time: f64,
    pub stddev_time: f64,
    pub mean_iterations: f64,
    pub success_rate: f64,
}

/// Arithmetic mean and sample (n - 1) standard deviation; zero deviation for one value.
pub fn mean_stddev(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    // Welford
    let mut m = 0.0;
    let mut s = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let d = x - m;
        m += d / (i + 1) as f64;
        s += d * (x - m);
    }
    Some((mean, (s / (n - 1.0)).max(0.0).sqrt()))
}

/// Summarises runs; `success_threshold` counts runs with fitness strictly below it.
pub fn summarize(records: &[RunRecord], success_threshold: f64) -> Result<StatsSummary> {
    if records.is_empty() {
        return Err(Error::Usage("cannot summarise zero runs".into()));
    }
    let fitness: Vec<f64> = records.iter().map(|r| r.best_fitness).collect();
    let times: Vec<f64> = records.iter().map(|r| r.wall_time.as_secs_f64()).collect();
    let iters: Vec<f64> = records.iter().map(|r| r.iterations as f64).collect();
    let (mean_fitness, stddev_fitness) = mean_stddev(&fitness).expect("non-empty");
    let (mean_time, stddev_time) = mean_stddev(&times).expect("non-empty");
    let (mean_iterations, _) = mean_stddev(&iters).expect("non-empty");
    let successes = fitness.iter().filter(|&&f| f < success_threshold).count();
    Ok(StatsSummary {
        runs: records.len(),
        mean_fitness,
        stddev_fitness,
        mean_time,
        stddev_time,
        mean_iterations,
        success_rate: successes as f64 / records.len() as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSumMethod {
    Exact,
    Normal,
    /// Every observation is identical; p is 1 by convention.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumTest {
    /// Rank sum of the first sample (midranks for ties).
    pub statistic: f64,
    pub p_value: f64,
    pub method: RankSumMethod,
}

impl RankSumTest {
    pub fn significant(&self) -> bool {
        self.p_value < SIGNIFICANCE_LEVEL
    }
}

/// 1-based midranks of the pooled sample.
pub fn midranks(pooled: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        // Positions i..j share the average of ranks i+1..=j.
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test.
///
/// Small samples (`|a| + |b| <= EXACT_RANK_SUM_LIMIT`) use the exact
/// permutation distribution of the midrank sum, `p = P(|W - mu| >= |w - mu|)`.
/// Larger samples use the normal approximation with tie-corrected variance and
/// a continuity correction.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Usage("rank-sum test needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Usage("rank-sum test input contains NaN".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let statistic: f64 = ranks[..a.len()].iter().sum();

    if pooled.iter().all(|&v| v == pooled[0]) {
        return Ok(RankSumTest {
            statistic,
            p_value: 1.0,
            method: RankSumMethod::Degenerate,
        });
    }
    if pooled.len() <= EXACT_RANK_SUM_LIMIT {
        let p_value = exact_p(&ranks, a.len());
        return Ok(RankSumTest {
            statistic,
            p_value,
            method: RankSumMethod::Exact,
        });
    }

    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let mu = n1 * (n + 1.0) / 2.0;
    let ties: f64 = tie_sizes(&pooled).map(|t| t * t * t - t).sum();
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let z = ((statistic - mu).abs() - 0.5).max(0.0) / var.sqrt();
    // 2 * (1 - Phi(z)) = erfc(z / sqrt 2)
    let p_value = erfc(z / std::f64::consts::SQRT_2).min(1.0);
    Ok(RankSumTest {
        statistic,
        p_value,
        method: RankSumMethod::Normal,
    })
}

fn tie_sizes(pooled: &[f64]) -> impl Iterator<Item = f64> {
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        sizes.push(j as f64);
        i += j;
    }
    sizes.into_iter()
}

/// Exact two-sided p-value by counting size-`n1` subsets per doubled rank sum.
fn exact_p(ranks: &[f64], n1: usize) -> f64 {
    // Doubled midranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[c][s]: subsets of size c with doubled sum s.
    let mut counts = vec![vec![0u128; max_sum + 1]; n1 + 1];
    counts[0][0] = 1;
    for (used, &r) in doubled.iter().enumerate() {
        for c in (1..=n1.min(used + 1)).rev() {
            let (lower, upper) = counts.split_at_mut(c);
            let prev = &lower[c - 1];
            let cur = &mut upper[0];
            for s in (r..=max_sum).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let observed: usize = doubled[..n1].iter().sum();
    let n = ranks.len();
    // Doubled mean: n1 * (n + 1).
    let mu2 = (n1 * (n + 1)) as i64;
    let dev = (observed as i64 - mu2).abs();
    let total: u128 = counts[n1].iter().sum();
    let extreme: u128 = counts[n1]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as i64 - mu2).abs() >= dev)
        .map(|(_, &c)| c)
        .sum();
    (extreme as f64 / total as f64).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupRow {
    pub threads: usize,
    pub mean_time: f64,
    pub speedup: f64,
}

/// `speedup(t) = mean_time(1) / mean_time(t)`, ordered by thread count.
pub fn speedup_report(mean_times: &BTreeMap<usize, f64>) -> Result<Vec<SpeedupRow>> {
    let base = *mean_times
        .get(&1)
        .ok_or_else(|| Error::Usage("speedup needs a 1-thread baseline".into()))?;
    Ok(mean_times
        .iter()
        .map(|(&threads, &mean_time)| SpeedupRow {
            threads,
            mean_time,
            speedup: base / mean_time,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn rec(f: f64, t: f64, it: u64) -> RunRecord {
        RunRecord {
            best_fitness: f,
            best_solution: vec![],
            iterations: it,
            evaluations: 0,
            merge_evaluations: 0,
            wall_time: Duration::from_secs_f64(t),
            seed: 0,
        }
    }

    #[test]
    fn textbook_summary() {
        let s = summarize(&[rec(1.0, 1.0, 10), rec(2.0, 1.0, 20), rec(3.0, 1.0, 30)], 2.5).unwrap();
        assert_eq!(s.mean_fitness, 2.0);
        assert!((s.stddev_fitness - 1.0).abs() < 1e-15);
        assert_eq!(s.mean_iterations, 20.0);
        assert!((s.success_rate - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.stddev_time, 0.0);

        let s = summarize(&[rec(4.0, 2.0, 7)], 1.0).unwrap();
        assert_eq!((s.mean_fitness, s.stddev_fitness, s.mean_time), (4.0, 0.0, 2.0));
        assert_eq!(s.success_rate, 0.0);

        assert!(matches!(summarize(&[], 1.0), Err(Error::Usage(_))));
    }

    #[test]
    fn midranks_handle_ties() {
        assert_eq!(midranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn rank_sum_examples() {
        let t = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(t.statistic, 6.0);
        assert!((t.p_value - 0.1).abs() < 1e-12);
        assert_eq!(t.method, RankSumMethod::Exact);

        let x = [0.3, 1.2, 5.0, 2.2];
        assert!(wilcoxon_rank_sum(&x, &x).unwrap().p_value >= 0.99);

        let t = wilcoxon_rank_sum(&[1.0; 3], &[1.0; 3]).unwrap();
        assert_eq!((t.p_value, t.method), (1.0, RankSumMethod::Degenerate));

        assert!(wilcoxon_rank_sum(&[], &[1.0]).is_err());
    }

    #[test]
    fn normal_route_for_large_samples() {
        let a: Vec<f64> = (0..60).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..60).map(|i| i as f64 + 0.5).collect();
        let t = wilcoxon_rank_sum(&a, &b).unwrap();
        assert_eq!(t.method, RankSumMethod::Normal);
        assert!(t.p_value > 0.5);
        assert!(wilcoxon_rank_sum(&a, &a).unwrap().p_value >= 0.99);

        let c: Vec<f64> = (0..60).map(|i| i as f64 + 100.0).collect();
        let t = wilcoxon_rank_sum(&a, &c).unwrap();
        assert!(t.significant());
        assert!(t.p_value < 1e-15);
    }

    #[test]
    fn speedup_examples() {
        let times = BTreeMap::from([(1, 10.0), (2, 5.0), (4, 2.0)]);
        let rows = speedup_report(&times).unwrap();
        assert_eq!(rows[0].speedup, 1.0);
        assert_eq!(rows[1].speedup, 2.0);
        assert!(rows.windows(2).all(|w| w[1].speedup > w[0].speedup));
        assert!(speedup_report(&BTreeMap::from([(2, 1.0)])).is_err());
    }
}
