//! Generalized linear models fitted by iteratively reweighted least squares,
//! with permutation tests, a two-way ANOVA and effect-size conversions.
//!
//! Random intercepts for participants or groups are approximated by
//! fixed-effect indicator columns built with [`cluster_dummies`].

mod anova;
mod design;
mod irls;
mod permutation;

pub use anova::{two_way_anova, AnovaRow, AnovaTable};
pub use design::{cluster_dummies, DesignMatrix};
pub use irls::{fit_glm, Family, GlmFit, GlmOptions};
pub use permutation::{permutation_test, PermutationResult, Statistic};

/// Percent change in the expected count (or odds) for a one-unit increase in
/// the predictor: `(exp(β) − 1)·100`.
pub fn rate_ratio(beta: f64) -> f64 {
    beta.exp_m1() * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_ratio_examples() {
        assert!((rate_ratio(0.03) - 3.0454534).abs() < 1e-6);
        assert_eq!(rate_ratio(0.0), 0.0);
        assert!((rate_ratio(-0.29) - -25.1736).abs() < 1e-3);
    }
}
