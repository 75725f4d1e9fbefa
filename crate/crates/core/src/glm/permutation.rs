use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    MeanDiff,
    MedianDiff,
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" | "mean-diff" => Ok(Statistic::MeanDiff),
            "median" | "median-diff" => Ok(Statistic::MedianDiff),
            other => Err(Error::invalid(format!("unknown statistic '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub statistic: Statistic,
    /// Observed `stat(a) − stat(b)`.
    pub observed: f64,
    pub p_value: f64,
    /// Arrangements evaluated: all of them when `exhaustive`, else the
    /// number of random draws.
    pub n_permutations: u64,
    pub exhaustive: bool,
    pub seed: u64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl Statistic {
    fn eval(self, a: &mut [f64], b: &mut [f64]) -> f64 {
        match self {
            Statistic::MeanDiff => mean(a) - mean(b),
            Statistic::MedianDiff => median(a) - median(b),
        }
    }
}

/// `C(n, k)` when it fits in a `u64`.
fn binomial(n: usize, k: usize) -> Option<u64> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return None;
        }
    }
    Some(c as u64)
}

fn cmp_samples(a: &[f64], b: &[f64]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Two-sided two-sample permutation test on `|stat(a) − stat(b)|`.
///
/// When the number of distinct splits `C(n_a + n_b, n_a)` is at most
/// `n_perm`, every split is enumerated and `p` is the fraction at least as
/// extreme as observed (the observed split included). Otherwise `n_perm`
/// random splits are drawn and `p = (1 + hits) / (1 + n_perm)`. Draw `k`
/// uses its own ChaCha8 stream `k` under `seed`, so the result does not
/// depend on scheduling, and the pooled data are put in a canonical order
/// first, so swapping `a` and `b` gives the same `p`.
pub fn permutation_test(
    a: &[f64],
    b: &[f64],
    statistic: Statistic,
    n_perm: u64,
    seed: u64,
    exec: Execution,
) -> Result<PermutationResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid(
            "permutation test needs two non-empty samples",
        ));
    }
    if n_perm == 0 {
        return Err(Error::invalid("permutation count must be at least 1"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::invalid("permutation test samples must be finite"));
    }
    let observed = statistic.eval(&mut a.to_vec(), &mut b.to_vec());

    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(f64::total_cmp);
    sb.sort_unstable_by(f64::total_cmp);
    if cmp_samples(&sa, &sb) == Ordering::Greater {
        std::mem::swap(&mut sa, &mut sb);
    }
    let k = sa.len();
    let pooled: Vec<f64> = sa.iter().chain(&sb).copied().collect();
    let n = pooled.len();
    let obs = observed.abs();
    let extreme = |s: f64| s.abs() + 1e-9 * (1.0 + obs) >= obs;

    let total = binomial(n, k);
    if let Some(total) = total.filter(|t| *t <= n_perm) {
        let mut hits = 0u64;
        let mut idx: Vec<usize> = (0..k).collect();
        let mut first = Vec::with_capacity(k);
        let mut second = Vec::with_capacity(n - k);
        loop {
            first.clear();
            second.clear();
            let mut next = 0;
            for (i, v) in pooled.iter().enumerate() {
                if next < k && idx[next] == i {
                    first.push(*v);
                    next += 1;
                } else {
                    second.push(*v);
                }
            }
            if extreme(statistic.eval(&mut first, &mut second)) {
                hits += 1;
            }
            let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
        return Ok(PermutationResult {
            statistic,
            observed,
            p_value: hits as f64 / total as f64,
            n_permutations: total,
            exhaustive: true,
            seed,
        });
    }

    let hits: u64 = exec
        .map_range(n_perm as usize, |draw| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(draw as u64);
            let mut v = pooled.clone();
            v.shuffle(&mut rng);
            let (first, second) = v.split_at_mut(k);
            u64::from(extreme(statistic.eval(first, second)))
        })
        .into_iter()
        .sum();
    Ok(PermutationResult {
        statistic,
        observed,
        p_value: (1 + hits) as f64 / (1 + n_perm) as f64,
        n_permutations: n_perm,
        exhaustive: false,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_samples_give_one() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        for n_perm in [10, 100_000] {
            let r = permutation_test(&a, &a, Statistic::MeanDiff, n_perm, 1, Execution::Parallel)
                .unwrap();
            assert_eq!(r.p_value, 1.0);
        }
    }

    #[test]
    fn exhaustive_example() {
        let r = permutation_test(
            &[10.0, 11.0, 12.0],
            &[0.0, 1.0, 2.0],
            Statistic::MeanDiff,
            1000,
            0,
            Execution::Sequential,
        )
        .unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.n_permutations, 20);
        assert!((r.p_value - 0.1).abs() < 1e-15);
        assert_eq!(r.observed, 10.0);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_bounded() {
        let a: Vec<f64> = (0..30).map(|i| (i % 7) as f64).collect();
        let b: Vec<f64> = (0..25).map(|i| (i % 5) as f64 + 0.7).collect();
        let r1 =
            permutation_test(&a, &b, Statistic::MedianDiff, 999, 42, Execution::Parallel).unwrap();
        let r2 = permutation_test(
            &a,
            &b,
            Statistic::MedianDiff,
            999,
            42,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(r1, r2);
        assert!(!r1.exhaustive);
        assert!(r1.p_value >= 1.0 / 1000.0 && r1.p_value <= 1.0);
    }

    #[test]
    fn strong_effect_is_detected() {
        let a: Vec<f64> = (0..40).map(|i| 5.0 + (i % 3) as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| (i % 3) as f64).collect();
        let r =
            permutation_test(&a, &b, Statistic::MeanDiff, 5000, 7, Execution::Parallel).unwrap();
        assert!((r.p_value - 1.0 / 5001.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(permutation_test(
            &[],
            &[1.0],
            Statistic::MeanDiff,
            10,
            0,
            Execution::Sequential
        )
        .is_err());
        assert!(permutation_test(
            &[1.0],
            &[1.0],
            Statistic::MeanDiff,
            0,
            0,
            Execution::Sequential
        )
        .is_err());
    }

    #[test]
    fn binomial_counts() {
        assert_eq!(binomial(6, 3), Some(20));
        assert_eq!(binomial(52, 5), Some(2_598_960));
        assert_eq!(binomial(200, 100), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn symmetric_in_samples(
            a in proptest::collection::vec(-5.0f64..5.0, 1..12),
            b in proptest::collection::vec(-5.0f64..5.0, 1..12),
            seed in 0u64..1000,
            median in proptest::bool::ANY,
        ) {
            let stat = if median { Statistic::MedianDiff } else { Statistic::MeanDiff };
            let p1 = permutation_test(&a, &b, stat, 300, seed, Execution::Sequential).unwrap();
            let p2 = permutation_test(&b, &a, stat, 300, seed, Execution::Sequential).unwrap();
            prop_assert_eq!(p1.p_value, p2.p_value);
            prop_assert!((p1.observed + p2.observed).abs() < 1e-12);
        }
    }
}
