//! Synthetic annotator populations and corpora with planted effects, used as
//! ground truth for recovery tests of every analysis.

mod annotations;
mod audit_scenario;
mod recovery;

pub use annotations::{
    simulate_annotations, SimConfig, SimData, SimTruth, TruthRating, TruthValue,
};
pub use audit_scenario::{simulate_audit_scenario, AuditScenario, AuditScenarioConfig, AuditTruth};
pub use recovery::{
    pearson, recovery_report, simulate_rasch, Estimates, RecoveryReport, SignMatch,
};

use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Integer rating on the 1–8 scale: a normal draw truncated to [0.5, 8.5)
/// and rounded to the nearest integer.
pub(crate) fn rating<R: Rng + ?Sized>(rng: &mut R, mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return mean.round().clamp(1.0, 8.0);
    }
    let normal = Normal::new(mean, sd).expect("finite mean and positive sd");
    for _ in 0..10_000 {
        let x: f64 = normal.sample(rng);
        if (0.5..8.5).contains(&x) {
            return x.round().clamp(1.0, 8.0);
        }
    }
    mean.round().clamp(1.0, 8.0)
}

pub(crate) fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ratings_stay_on_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [false; 9];
        for _ in 0..5000 {
            let r = rating(&mut rng, 4.5, 2.5);
            assert!((1.0..=8.0).contains(&r) && r.fract() == 0.0);
            seen[r as usize] = true;
        }
        assert!(seen[1..].iter().all(|s| *s));
        assert_eq!(rating(&mut rng, 20.0, 0.0), 8.0);
    }
}
