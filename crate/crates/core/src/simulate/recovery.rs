use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{logistic, SimTruth};
use crate::psychometrics::ResponseMatrix;
use crate::{Error, Result};

/// Pearson correlation of two equally long samples.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "correlation of samples with lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::invalid("correlation needs at least two pairs"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("correlation with a constant sample"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Estimated quantities keyed by the ids used in [`SimTruth`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub theta: Vec<(String, f64)>,
    pub delta: Vec<(String, f64)>,
    /// Fitted coefficients named `competence` or `warmth`.
    pub coefficients: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignMatch {
    pub name: String,
    pub planted: f64,
    pub fitted: f64,
    /// `None` when the planted value is zero.
    pub matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub theta_r: Option<f64>,
    pub delta_r: Option<f64>,
    pub n_theta: usize,
    pub n_delta: usize,
    pub signs: Vec<SignMatch>,
}

fn paired(
    est: &[(String, f64)],
    truth: &HashMap<&str, f64>,
    what: &str,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = Vec::with_capacity(est.len());
    let mut b = Vec::with_capacity(est.len());
    for (id, v) in est {
        let t = truth
            .get(id.as_str())
            .ok_or_else(|| Error::invalid(format!("{what} estimate for unknown id '{id}'")))?;
        a.push(*v);
        b.push(*t);
    }
    Ok((a, b))
}

/// Correlations of estimated against planted parameters and sign agreement
/// of regression coefficients.
pub fn recovery_report(estimates: &Estimates, truth: &SimTruth) -> Result<RecoveryReport> {
    let theta: HashMap<&str, f64> = truth
        .theta
        .iter()
        .map(|t| (t.id.as_str(), t.value))
        .collect();
    let delta: HashMap<&str, f64> = truth
        .delta
        .iter()
        .map(|t| (t.id.as_str(), t.value))
        .collect();
    let (th, tt) = paired(&estimates.theta, &theta, "theta")?;
    let (dh, dt) = paired(&estimates.delta, &delta, "delta")?;
    let corr = |a: &[f64], b: &[f64]| (!a.is_empty()).then(|| pearson(a, b)).transpose();
    let mut signs = Vec::new();
    for (name, fitted) in &estimates.coefficients {
        let planted = match name.as_str() {
            "competence" => truth.b_competence,
            "warmth" => truth.b_warmth,
            other => {
                return Err(Error::invalid(format!(
                    "no planted coefficient named '{other}'"
                )))
            }
        };
        signs.push(SignMatch {
            name: name.clone(),
            planted,
            fitted: *fitted,
            matches: (planted != 0.0).then(|| planted.signum() == fitted.signum()),
        });
    }
    Ok(RecoveryReport {
        theta_r: corr(&th, &tt)?,
        delta_r: corr(&dh, &dt)?,
        n_theta: th.len(),
        n_delta: dh.len(),
        signs,
    })
}

/// Complete Rasch responses with standard-normal tendencies and
/// difficulties. Returns the matrix with the planted θ and δ.
pub fn simulate_rasch(
    n_persons: usize,
    n_items: usize,
    seed: u64,
) -> Result<(ResponseMatrix, Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: Vec<f64> = (0..n_persons)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let delta: Vec<f64> = (0..n_items)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let rows: Vec<Vec<u8>> = theta
        .iter()
        .map(|t| {
            delta
                .iter()
                .map(|d| u8::from(rng.random::<f64>() < logistic(t - d)))
                .collect()
        })
        .collect();
    let persons = (0..n_persons).map(|p| format!("p{:04}", p + 1)).collect();
    let items = (0..n_items).map(|j| format!("i{:03}", j + 1)).collect();
    Ok((
        ResponseMatrix::from_complete(persons, items, rows)?,
        theta,
        delta,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psychometrics::{estimate_tendencies, fit_rasch_cml, RaschOptions};
    use crate::simulate::{simulate_annotations, SimConfig};

    #[test]
    fn pearson_examples() {
        let expect = 4.5 / (2.0f64 * 61.0 / 6.0).sqrt();
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.5]).unwrap() - expect).abs() < 1e-12);
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    fn small_truth() -> SimTruth {
        let cfg = SimConfig {
            n_participants: 20,
            n_groups: 2,
            items_per_group: 3,
            ..SimConfig::default()
        };
        simulate_annotations(&cfg, 4).unwrap().truth
    }

    #[test]
    fn perfect_and_reversed_estimates() {
        let t = small_truth();
        let same = Estimates {
            theta: t.theta.iter().map(|v| (v.id.clone(), v.value)).collect(),
            delta: t.delta.iter().map(|v| (v.id.clone(), v.value)).collect(),
            coefficients: vec![("competence".into(), 0.28), ("warmth".into(), 0.1)],
        };
        let r = recovery_report(&same, &t).unwrap();
        assert!((r.theta_r.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.delta_r.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.signs[0].matches, Some(true));
        assert_eq!(r.signs[1].matches, None);
        let neg = Estimates {
            theta: same.theta.iter().map(|(i, v)| (i.clone(), -v)).collect(),
            delta: same.delta.iter().map(|(i, v)| (i.clone(), -v)).collect(),
            coefficients: vec![("competence".into(), -0.2)],
        };
        let r = recovery_report(&neg, &t).unwrap();
        assert!((r.theta_r.unwrap() + 1.0).abs() < 1e-12);
        assert!((r.delta_r.unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(r.signs[0].matches, Some(false));
    }

    #[test]
    fn unknown_ids_rejected() {
        let t = small_truth();
        let bad = Estimates {
            theta: vec![("nobody".into(), 0.0)],
            ..Default::default()
        };
        assert!(recovery_report(&bad, &t).is_err());
    }

    #[test]
    fn rasch_block_recovery() {
        let (m, theta, delta) = simulate_rasch(500, 30, 11).unwrap();
        let fit = fit_rasch_cml(&m, &RaschOptions::default()).unwrap();
        assert!(pearson(&fit.difficulties, &delta).unwrap() >= 0.9);
        let tend = estimate_tendencies(&m, &fit.difficulties).unwrap();
        let th: Vec<f64> = tend.iter().map(|t| t.theta).collect();
        assert!(pearson(&th, &theta).unwrap() >= 0.85);
    }
}
