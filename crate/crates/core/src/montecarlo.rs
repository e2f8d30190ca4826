//! Reproducible trial-by-trial sampling of outcome distributions.
//!
//! Trial `i` under master seed `s` draws a single uniform variate from
//! [`trial_uniform`]`(s, i)` and maps it through the inverse CDF of the
//! distribution, walking outcomes in lexicographic label order. Because each
//! trial depends only on `(s, i)`, a run can be split into any number of
//! ranges or workers and still produce the same counts.

use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialLedger {
    pub master_seed: u64,
    pub trials: u64,
    pub counts: BTreeMap<String, u64>,
}

impl TrialLedger {
    pub fn empty(dist: &OutcomeDistribution, master_seed: u64) -> Self {
        Self {
            master_seed,
            trials: 0,
            counts: dist.labels().map(|l| (l.to_owned(), 0)).collect(),
        }
    }

    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn frequency(&self, label: &str) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.count(label) as f64 / self.trials as f64
        }
    }

    /// Adds another ledger's counts. Both must share a master seed.
    pub fn merge(&mut self, other: &TrialLedger) {
        assert_eq!(
            self.master_seed, other.master_seed,
            "merging ledgers of different seeds"
        );
        self.trials += other.trials;
        for (label, n) in &other.counts {
            *self.counts.entry(label.clone()).or_insert(0) += n;
        }
    }
}

/// SplitMix64 finalizer (Steele, Lea and Flood 2014).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed: `mix64(master ^ mix64(index + golden))`.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    mix64(master_seed ^ mix64(trial_index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Uniform variate in `[0, 1)` with 53 random bits for one trial.
pub fn trial_uniform(master_seed: u64, trial_index: u64) -> f64 {
    (trial_seed(master_seed, trial_index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

struct InverseCdf<'a> {
    // (upper cumulative bound, label), outcomes with zero probability dropped
    steps: Vec<(f64, &'a str)>,
}

impl<'a> InverseCdf<'a> {
    fn new(dist: &'a OutcomeDistribution) -> Self {
        let mut acc = 0.0;
        let steps = dist
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(l, p)| {
                acc += p;
                (acc, l)
            })
            .collect();
        Self { steps }
    }

    fn index(&self, u: f64) -> usize {
        // A variate past the last cumulative bound (rounding) falls in the
        // final nonzero outcome.
        self.steps
            .iter()
            .position(|(bound, _)| u < *bound)
            .unwrap_or(self.steps.len() - 1)
    }
}

/// Samples trials `range` (trial indices) under `master_seed`.
pub fn sample_range(dist: &OutcomeDistribution, range: Range<u64>, master_seed: u64) -> TrialLedger {
    let cdf = InverseCdf::new(dist);
    let mut ledger = TrialLedger::empty(dist, master_seed);
    if cdf.steps.is_empty() {
        return ledger;
    }
    let mut hits = vec![0u64; cdf.steps.len()];
    for i in range.clone() {
        hits[cdf.index(trial_uniform(master_seed, i))] += 1;
    }
    for ((_, label), n) in cdf.steps.iter().zip(hits) {
        *ledger.counts.get_mut(*label).expect("label from dist") += n;
    }
    ledger.trials = range.end.saturating_sub(range.start);
    ledger
}

pub fn sample(dist: &OutcomeDistribution, trials: u64, master_seed: u64) -> TrialLedger {
    sample_range(dist, 0..trials, master_seed)
}

/// Same ledger as [`sample`], computed on `workers` contiguous ranges in
/// parallel.
pub fn sample_parallel(dist: &OutcomeDistribution, trials: u64, master_seed: u64, workers: usize) -> TrialLedger {
    let workers = workers.max(1) as u64;
    let chunk = trials.div_ceil(workers).max(1);
    let parts: Vec<TrialLedger> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let start = (w * chunk).min(trials);
            let end = ((w + 1) * chunk).min(trials);
            sample_range(dist, start..end, master_seed)
        })
        .collect();
    let mut ledger = TrialLedger::empty(dist, master_seed);
    for part in &parts {
        ledger.merge(part);
    }
    ledger
}

/// `k * sqrt(p (1 - p) / n)`: half-width of a k-sigma binomial band on an
/// empirical frequency.
pub fn binomial_bound(p: f64, trials: u64, sigmas: f64) -> f64 {
    sigmas * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Labels whose empirical frequency falls outside the `sigmas` band.
pub fn frequency_violations(ledger: &TrialLedger, dist: &OutcomeDistribution, sigmas: f64) -> Vec<String> {
    let mut labels: Vec<&str> = dist.labels().collect();
    labels.extend(ledger.counts.keys().map(String::as_str).filter(|l| !dist.contains(l)));
    labels
        .into_iter()
        .filter(|l| {
            let p = dist.prob(l);
            (ledger.frequency(l) - p).abs() > binomial_bound(p, ledger.trials, sigmas)
        })
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub critical_value: f64,
    pub pass: bool,
}

/// Upper 0.1% quantiles of the chi-square distribution for 1..=30 degrees of
/// freedom, as tabulated in NIST/SEMATECH e-Handbook of Statistical Methods,
/// section 1.3.6.7.4 (three decimals).
const CHI2_999: [f64; 30] = [
    10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877, 29.588, 31.264, 32.909, 34.528, 36.123,
    37.697, 39.252, 40.790, 42.312, 43.820, 45.315, 46.797, 48.268, 49.728, 51.179, 52.620, 54.052, 55.476, 56.892,
    58.301, 59.703,
];

/// 99.9% critical value. Beyond the table, the Wilson-Hilferty cube-root
/// approximation with `z = 3.090232`.
pub fn chi_square_critical_999(dof: usize) -> f64 {
    match dof {
        0 => 0.0,
        1..=30 => CHI2_999[dof - 1],
        _ => {
            let k = dof as f64;
            let h = 2.0 / (9.0 * k);
            k * (1.0 - h + 3.090_232 * h.sqrt()).powi(3)
        }
    }
}

/// Minimum expected count for an outcome to form its own bucket.
pub const MIN_EXPECTED: f64 = 5.0;

/// Pearson goodness-of-fit test of `ledger` against `dist` at the 99.9% level.
///
/// Bucketing: every outcome with expected count `>= 5` is its own bucket.
/// The rest, together with any ledger label `dist` does not list, are pooled
/// into one bucket. If the pool still expects fewer than 5 counts it is folded
/// into the smallest regular bucket, unless it expects nothing at all yet saw
/// counts: such a pool stays separate, making the statistic infinite and the
/// check fail. If there is no regular bucket, the pool is the only bucket.
/// `dof = buckets - 1`.
pub fn chi_square_check(ledger: &TrialLedger, dist: &OutcomeDistribution) -> ChiSquare {
    let n = ledger.trials as f64;
    let mut buckets: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for (label, p) in dist.iter() {
        let expected = p * n;
        let observed = ledger.count(label) as f64;
        if expected >= MIN_EXPECTED {
            buckets.push((expected, observed));
        } else {
            pool.0 += expected;
            pool.1 += observed;
        }
    }
    for (label, &count) in &ledger.counts {
        if !dist.contains(label) {
            pool.1 += count as f64;
        }
    }
    if pool.0 >= MIN_EXPECTED || (pool.0 == 0.0 && pool.1 > 0.0) {
        buckets.push(pool);
    } else if pool != (0.0, 0.0) {
        match buckets.iter_mut().min_by(|a, b| a.0.total_cmp(&b.0)) {
            Some(smallest) => {
                smallest.0 += pool.0;
                smallest.1 += pool.1;
            }
            None => buckets.push(pool),
        }
    }

    let statistic = buckets
        .iter()
        .map(|&(e, o)| match (e > 0.0, o > 0.0) {
            (true, _) => (o - e).powi(2) / e,
            (false, true) => f64::INFINITY,
            (false, false) => 0.0,
        })
        .sum::<f64>();
    let dof = buckets.len().saturating_sub(1);
    let critical_value = chi_square_critical_999(dof);
    let pass = if dof == 0 {
        statistic.is_finite()
    } else {
        statistic < critical_value
    };
    ChiSquare {
        statistic,
        dof,
        critical_value,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn good_bomb() -> OutcomeDistribution {
        OutcomeDistribution::from_pairs([("explosion", 0.5), ("D1", 0.25), ("D2", 0.25)]).unwrap()
    }

    #[test]
    fn zero_trials() {
        let l = sample(&good_bomb(), 0, 7);
        assert_eq!(l.trials, 0);
        assert!(l.counts.values().all(|&c| c == 0));
        assert_eq!(l.counts.len(), 3);
    }

    #[test]
    fn certain_outcome() {
        let d = OutcomeDistribution::from_pairs([("D1", 1.0), ("D2", 0.0)]).unwrap();
        for seed in [0, 1, u64::MAX] {
            let l = sample(&d, 1000, seed);
            assert_eq!(l.count("D1"), 1000);
            assert_eq!(l.count("D2"), 0);
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(sample(&good_bomb(), 10_000, 42), sample(&good_bomb(), 10_000, 42));
        assert_ne!(sample(&good_bomb(), 10_000, 42), sample(&good_bomb(), 10_000, 43));
    }

    #[test]
    fn partitions_agree() {
        let d = good_bomb();
        let whole = sample(&d, 100_000, 9);
        let mut parts = TrialLedger::empty(&d, 9);
        for k in 0..4 {
            parts.merge(&sample_range(&d, k * 25_000..(k + 1) * 25_000, 9));
        }
        assert_eq!(parts, whole);
        for w in [1, 3, 4, 7] {
            assert_eq!(sample_parallel(&d, 100_000, 9, w), whole);
        }
        assert_eq!(sample_parallel(&d, 2, 9, 8), sample(&d, 2, 9));
    }

    #[test]
    fn uniforms_in_range() {
        for i in 0..10_000 {
            let u = trial_uniform(3, i);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn inverse_cdf_walks_lexicographic_order() {
        // D1 < D2 < explosion: [0, .25) -> D1, [.25, .5) -> D2, rest explosion.
        let d = good_bomb();
        let cdf = InverseCdf::new(&d);
        assert_eq!(cdf.steps[cdf.index(0.0)].1, "D1");
        assert_eq!(cdf.steps[cdf.index(0.3)].1, "D2");
        assert_eq!(cdf.steps[cdf.index(0.75)].1, "explosion");
        assert_eq!(cdf.steps[cdf.index(0.999_999_999_999_999_9)].1, "explosion");
    }

    #[test]
    fn chi_square_dof_and_pass() {
        let d = good_bomb();
        let l = sample(&d, 100_000, 2024);
        let c = chi_square_check(&l, &d);
        assert_eq!(c.dof, 2);
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn chi_square_rejects_wrong_mass() {
        let d = good_bomb();
        let mut l = TrialLedger::empty(&d, 0);
        l.trials = 1_000_000;
        l.counts.insert("D1".into(), 1_000_000);
        assert!(!chi_square_check(&l, &d).pass);
    }

    #[test]
    fn chi_square_pools_small_expectations() {
        let d = OutcomeDistribution::from_pairs([("a", 0.5), ("b", 0.499), ("c", 0.001)]).unwrap();
        let l = sample(&d, 1000, 5);
        let c = chi_square_check(&l, &d);
        // c expects 1 count: pooled and folded into b.
        assert_eq!(c.dof, 1);

        let certain = OutcomeDistribution::from_pairs([("D1", 1.0), ("D2", 0.0)]).unwrap();
        let l = sample(&certain, 100, 1);
        let c = chi_square_check(&l, &certain);
        assert_eq!(c.dof, 0);
        assert!(c.pass);

        let mut impossible = l.clone();
        impossible.counts.insert("D2".into(), 1);
        impossible.counts.insert("D1".into(), 99);
        let c = chi_square_check(&impossible, &certain);
        assert!(!c.pass);
        assert!(c.statistic.is_infinite());
    }

    #[test]
    fn critical_values() {
        assert_eq!(chi_square_critical_999(1), 10.828);
        assert_eq!(chi_square_critical_999(2), 13.816);
        // Wilson-Hilferty is within 0.5% of the table at its edge.
        let k = 30.0f64;
        let h = 2.0 / (9.0 * k);
        let approx = k * (1.0 - h + 3.090_232 * h.sqrt()).powi(3);
        assert!((approx - 59.703).abs() / 59.703 < 5e-3);
        assert!(chi_square_critical_999(31) > chi_square_critical_999(30));
    }

    #[test]
    fn binomial_band() {
        assert_eq!(binomial_bound(0.5, 1_000_000, 4.0), 0.002);
        assert_eq!(binomial_bound(1.0, 10, 4.0), 0.0);
    }
}
