use num_rational::Ratio;
use num_traits::{CheckedAdd, Zero};

/// Mean of fractions `num/den`, accumulated as an exact rational.
///
/// Falls back to a compensated floating sum if the common denominator
/// overflows `u128`, which needs item sets with very large, pairwise-coprime
/// co-annotator counts.
pub(crate) fn exact_mean<I>(fracs: I) -> f64
where
    I: IntoIterator<Item = (u128, u128)>,
{
    let fracs: Vec<(u128, u128)> = fracs.into_iter().collect();
    assert!(!fracs.is_empty(), "mean of an empty set");
    let count = fracs.len() as u128;
    let mut acc = Some(Ratio::<u128>::zero());
    for &(n, d) in &fracs {
        acc = acc.and_then(|a| a.checked_add(&Ratio::new(n, d)));
    }
    if let Some(sum) = acc {
        if let Some(den) = sum.denom().checked_mul(count) {
            return *sum.numer() as f64 / den as f64;
        }
    }
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (n, d) in fracs {
        let y = n as f64 / d as f64 - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s / count as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_thirds() {
        let m = exact_mean([(1, 3), (2, 3), (3, 3)]);
        assert_eq!(m, 2.0 / 3.0);
    }

    #[test]
    fn overflow_falls_back() {
        let primes: [u128; 6] = [
            18446744073709551557,
            18446744073709551533,
            18446744073709551521,
            18446744073709551437,
            18446744073709551427,
            18446744073709551359,
        ];
        let m = exact_mean(primes.iter().map(|&p| (p / 2, p)));
        assert!((m - 0.5).abs() < 1e-12);
    }
}
