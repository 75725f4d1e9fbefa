use crate::{Error, Result};

/// Elementary symmetric functions `γ_0..γ_k` of `ε_j = exp(log_eps_j)`, held
/// as `γ_r = values[r] · exp(log_scale + r·shift)`.
///
/// Every `ε` is divided by the largest one before the summation recursion, and
/// the partial sums are rescaled by their running maximum whenever they drift
/// far from 1, so long item lists neither overflow nor underflow.
#[derive(Debug, Clone)]
pub(crate) struct ScaledEsf {
    values: Vec<f64>,
    log_scale: f64,
    shift: f64,
}

impl ScaledEsf {
    /// Build from `ln ε_j`, leaving out the indices in `skip`.
    pub(crate) fn from_log_eps(log_eps: &[f64], skip: &[usize]) -> Self {
        let keep = |j: &usize| !skip.contains(j);
        let shift = (0..log_eps.len())
            .filter(keep)
            .map(|j| log_eps[j])
            .fold(f64::NEG_INFINITY, f64::max);
        let shift = if shift.is_finite() { shift } else { 0.0 };

        let kept = (0..log_eps.len()).filter(keep).count();
        let mut values = vec![0.0; kept + 1];
        values[0] = 1.0;
        let mut log_scale = 0.0;
        let mut used = 0;
        for j in (0..log_eps.len()).filter(keep) {
            let e = (log_eps[j] - shift).exp();
            used += 1;
            for r in (1..=used).rev() {
                values[r] += e * values[r - 1];
            }
            let m = values[..=used].iter().cloned().fold(0.0, f64::max);
            if !(1e-150..=1e150).contains(&m) {
                for v in &mut values[..=used] {
                    *v /= m;
                }
                log_scale += m.ln();
            }
        }
        Self {
            values,
            log_scale,
            shift,
        }
    }

    /// `ln γ_r`; `-inf` outside `0..=k`.
    pub(crate) fn ln(&self, r: isize) -> f64 {
        if r < 0 || r as usize >= self.values.len() {
            return f64::NEG_INFINITY;
        }
        let r = r as usize;
        self.values[r].ln() + self.log_scale + r as f64 * self.shift
    }
}

/// `γ_0..γ_k` for positive inputs, by the summation recursion
/// `γ_r ← γ_r + ε_j γ_{r−1}`.
///
/// Values that exceed the `f64` range come back as `inf`; use
/// [`log_elementary_symmetric`] for long or extreme inputs.
pub fn elementary_symmetric(eps: &[f64]) -> Result<Vec<f64>> {
    let logs = log_elementary_symmetric(eps)?;
    Ok(logs.into_iter().map(f64::exp).collect())
}

/// `ln γ_0..ln γ_k` computed in rescaled arithmetic.
pub fn log_elementary_symmetric(eps: &[f64]) -> Result<Vec<f64>> {
    if eps.is_empty() {
        return Err(Error::invalid(
            "elementary symmetric functions need at least one value",
        ));
    }
    if let Some(bad) = eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::invalid(format!(
            "elementary symmetric functions need finite positive inputs, got {bad}"
        )));
    }
    let log_eps: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let esf = ScaledEsf::from_log_eps(&log_eps, &[]);
    Ok((0..=eps.len() as isize).map(|r| esf.ln(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Sum of products over every r-subset, by walking all bitmasks.
    fn subsets(eps: &[f64]) -> Vec<f64> {
        let k = eps.len();
        let mut g = vec![0.0; k + 1];
        for mask in 0u32..(1 << k) {
            let p: f64 = (0..k)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| eps[j])
                .product();
            g[mask.count_ones() as usize] += p;
        }
        g
    }

    #[test]
    fn small_examples() {
        assert_eq!(
            elementary_symmetric(&[1.0, 1.0]).unwrap(),
            vec![1.0, 2.0, 1.0]
        );
        let g = elementary_symmetric(&[1.0, 2.0, 3.0]).unwrap();
        for (a, b) in g.iter().zip([1.0, 6.0, 11.0, 6.0]) {
            assert!((a - b).abs() < 1e-12 * b);
        }
        assert_eq!(elementary_symmetric(&[0.3, 7.0, 1e-3]).unwrap()[0], 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(elementary_symmetric(&[]).is_err());
        assert!(elementary_symmetric(&[1.0, 0.0]).is_err());
        assert!(elementary_symmetric(&[1.0, -2.0]).is_err());
        assert!(elementary_symmetric(&[f64::NAN]).is_err());
    }

    #[test]
    fn long_lists_stay_finite_in_log_space() {
        let eps = vec![1e3; 400];
        let lg = log_elementary_symmetric(&eps).unwrap();
        // γ_400 = 1e3^400
        assert!((lg[400] - 400.0 * 1e3f64.ln()).abs() < 1e-8 * lg[400]);
        let eps = vec![1e-3; 400];
        let lg = log_elementary_symmetric(&eps).unwrap();
        assert!(lg.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn skip_matches_removal() {
        let log_eps = [0.1, -0.4, 1.2, 0.0];
        let a = ScaledEsf::from_log_eps(&log_eps, &[1]);
        let b = ScaledEsf::from_log_eps(&[0.1, 1.2, 0.0], &[]);
        for r in 0..=3 {
            assert!((a.ln(r) - b.ln(r)).abs() < 1e-12);
        }
        assert_eq!(a.ln(4), f64::NEG_INFINITY);
        assert_eq!(a.ln(-1), f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn matches_subset_enumeration(eps in proptest::collection::vec(0.01f64..20.0, 1..=12)) {
            let g = elementary_symmetric(&eps).unwrap();
            let brute = subsets(&eps);
            for (a, b) in g.iter().zip(&brute) {
                prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(f64::MIN_POSITIVE));
            }
            let total: f64 = g.iter().sum();
            let prod: f64 = eps.iter().map(|e| 1.0 + e).product();
            prop_assert!((total - prod).abs() <= 1e-10 * prod);
        }
    }
}
