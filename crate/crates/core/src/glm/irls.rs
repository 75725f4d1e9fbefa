use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use super::design::{DesignMatrix, SparseRows};
use crate::linalg::{cholesky, cholesky_inverse, cholesky_solve, dependent_columns, Square};
use crate::{Error, Result};

/// Response distribution with its canonical link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "poisson-log")]
    Poisson,
    #[serde(rename = "binomial-logit")]
    Binomial,
    #[serde(rename = "gaussian-identity")]
    Gaussian,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Poisson => "poisson-log",
            Family::Binomial => "binomial-logit",
            Family::Gaussian => "gaussian-identity",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "poisson" | "poisson-log" => Ok(Family::Poisson),
            "binomial" | "logistic" | "logit" | "binomial-logit" => Ok(Family::Binomial),
            "gaussian" | "linear" | "normal" | "gaussian-identity" => Ok(Family::Gaussian),
            other => Err(Error::invalid(format!("unknown family '{other}'"))),
        }
    }
}

fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// `a·ln(a/b)` with the convention `0·ln 0 = 0`.
fn xlogy_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * (a / b).ln()
    }
}

impl Family {
    fn mean(self, eta: f64) -> f64 {
        match self {
            Family::Poisson => eta.exp(),
            Family::Binomial => logistic(eta),
            Family::Gaussian => eta,
        }
    }

    fn link(self, mu: f64) -> f64 {
        match self {
            Family::Poisson => mu.ln(),
            Family::Binomial => (mu / (1.0 - mu)).ln(),
            Family::Gaussian => mu,
        }
    }

    /// `dμ/dη`, which equals the variance function under a canonical link.
    fn variance(self, mu: f64) -> f64 {
        match self {
            Family::Poisson => mu,
            Family::Binomial => mu * (1.0 - mu),
            Family::Gaussian => 1.0,
        }
    }

    fn start(self, y: f64, m: f64) -> f64 {
        match self {
            Family::Poisson => y + 0.1,
            Family::Binomial => (m * y + 0.5) / (m + 1.0),
            Family::Gaussian => y,
        }
    }

    fn unit_deviance(self, y: f64, mu: f64) -> f64 {
        match self {
            Family::Poisson => 2.0 * (xlogy_ratio(y, mu) - (y - mu)),
            Family::Binomial => 2.0 * (xlogy_ratio(y, mu) + xlogy_ratio(1.0 - y, 1.0 - mu)),
            Family::Gaussian => (y - mu) * (y - mu),
        }
    }

    fn check_response(self, y: f64) -> bool {
        y.is_finite()
            && match self {
                Family::Poisson => y >= 0.0,
                Family::Binomial => (0.0..=1.0).contains(&y),
                Family::Gaussian => true,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmOptions {
    /// Prior weights; for the binomial family the number of trials behind
    /// each proportion.
    pub weights: Option<Vec<f64>>,
    pub max_iterations: usize,
    /// Bound on the relative deviance change `|Δdev| / (|dev| + 0.1)`.
    pub tolerance: f64,
    /// Bound on the scaled score residual required for convergence.
    pub score_tolerance: f64,
    /// L2 penalty on every coefficient except the intercept.
    pub ridge: f64,
    /// A binomial coefficient beyond this magnitude marks separation.
    pub separation_bound: f64,
}

impl Default for GlmOptions {
    fn default() -> Self {
        Self {
            weights: None,
            max_iterations: 100,
            tolerance: 1e-10,
            score_tolerance: 1e-8,
            ridge: 0.0,
            separation_bound: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmFit {
    pub family: Family,
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub z_values: Vec<f64>,
    /// Two-sided Wald p-values from the standard normal.
    pub p_values: Vec<f64>,
    pub deviance: f64,
    pub log_likelihood: f64,
    /// Residual mean deviance for the Gaussian family, 1 otherwise.
    pub dispersion: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `‖Xᵀ W₀ (y − μ̂)‖∞ / (1 + ‖Xᵀ W₀ |y|‖∞)` at the returned estimate,
    /// where `W₀` holds the prior weights.
    pub score_residual: f64,
    /// Deviance after each iteration, penalty included.
    pub deviance_history: Vec<f64>,
    pub diagnostic: Option<String>,
    pub n_obs: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    #[serde(skip)]
    pub fitted: Vec<f64>,
}

impl GlmFit {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.index(name).map(|j| self.coefficients[j])
    }

    pub fn se(&self, name: &str) -> Option<f64> {
        self.index(name).map(|j| self.standard_errors[j])
    }

    pub fn p_value(&self, name: &str) -> Option<f64> {
        self.index(name).map(|j| self.p_values[j])
    }
}

struct State {
    beta: Vec<f64>,
    eta: Vec<f64>,
    mu: Vec<f64>,
    deviance: f64,
}

struct Problem<'a> {
    family: Family,
    rows: SparseRows,
    y: &'a [f64],
    m: Vec<f64>,
    offset: Vec<f64>,
    p: usize,
    penalized: Vec<bool>,
    ridge: f64,
}

impl Problem<'_> {
    fn state(&self, beta: Vec<f64>) -> State {
        let eta: Vec<f64> = (0..self.y.len())
            .map(|i| self.rows.dot(i, &beta) + self.offset[i])
            .collect();
        let mu: Vec<f64> = eta.iter().map(|&e| self.family.mean(e)).collect();
        let deviance = self.deviance(&mu) + self.penalty(&beta);
        State {
            beta,
            eta,
            mu,
            deviance,
        }
    }

    fn deviance(&self, mu: &[f64]) -> f64 {
        (0..self.y.len())
            .map(|i| self.m[i] * self.family.unit_deviance(self.y[i], mu[i]))
            .sum()
    }

    fn penalty(&self, beta: &[f64]) -> f64 {
        if self.ridge == 0.0 {
            return 0.0;
        }
        beta.iter()
            .zip(&self.penalized)
            .filter(|(_, p)| **p)
            .map(|(b, _)| self.ridge * b * b)
            .sum()
    }

    /// Weighted cross-product `XᵀWX` (plus ridge) and `XᵀWz` at `(eta, mu)`.
    fn normal_equations(&self, eta: &[f64], mu: &[f64]) -> (Square, Vec<f64>) {
        let p = self.p;
        let mut h = Square::zeros(p);
        let mut g = vec![0.0; p];
        for i in 0..self.y.len() {
            let v = self.family.variance(mu[i]).max(f64::MIN_POSITIVE);
            let w = self.m[i] * v;
            let z = eta[i] - self.offset[i] + (self.y[i] - mu[i]) / v;
            for (a, xa) in self.rows.row(i) {
                g[a] += w * xa * z;
                let wa = w * xa;
                for (b, xb) in self.rows.row(i) {
                    if b >= a {
                        h.a[a * p + b] += wa * xb;
                    }
                }
            }
        }
        for j in 0..p {
            if self.penalized[j] {
                h.a[j * p + j] += self.ridge;
            }
        }
        h.symmetrize_from_upper();
        (h, g)
    }

    fn score_residual(&self, s: &State) -> f64 {
        let mut score = vec![0.0; self.p];
        let mut scale = vec![0.0; self.p];
        for i in 0..self.y.len() {
            let r = self.m[i] * (self.y[i] - s.mu[i]);
            let a = self.m[i] * self.y[i].abs();
            for (j, x) in self.rows.row(i) {
                score[j] += r * x;
                scale[j] += a * x.abs();
            }
        }
        for ((sc, &pen), b) in score.iter_mut().zip(&self.penalized).zip(&s.beta) {
            if pen {
                *sc -= self.ridge * b;
            }
        }
        let num = score.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let den = scale.iter().fold(0.0f64, |m, v| m.max(*v));
        num / (1.0 + den)
    }
}

fn rank_error(h: &Square, names: &[String]) -> Error {
    let bad = dependent_columns(h);
    let columns = if bad.is_empty() {
        names.to_vec()
    } else {
        bad.into_iter().map(|j| names[j].clone()).collect()
    };
    Error::RankDeficient { columns }
}

/// Fit a GLM with canonical link by IRLS with step-halving.
///
/// Iteration stops once the relative deviance change is below
/// `options.tolerance` and the scaled score residual is below
/// `options.score_tolerance`, or after `options.max_iterations`.
pub fn fit_glm(
    x: &DesignMatrix,
    y: &[f64],
    family: Family,
    options: &GlmOptions,
) -> Result<GlmFit> {
    let n = x.n_rows();
    let p = x.n_cols();
    if p == 0 {
        return Err(Error::invalid("design has no columns"));
    }
    if y.len() != n {
        return Err(Error::invalid(format!(
            "response has {} values, design has {n} rows",
            y.len()
        )));
    }
    if n <= p {
        return Err(Error::invalid(format!(
            "need more observations ({n}) than coefficients ({p})"
        )));
    }
    if let Some(i) = y.iter().position(|v| !family.check_response(*v)) {
        return Err(Error::invalid(format!(
            "response {} at row {i} is outside the {family} domain",
            y[i]
        )));
    }
    let m = match &options.weights {
        Some(w) if w.len() != n => {
            return Err(Error::invalid("weight vector length differs from rows"))
        }
        Some(w) if w.iter().any(|v| !v.is_finite() || *v < 0.0) => {
            return Err(Error::invalid("weights must be finite and non-negative"))
        }
        Some(w) => w.clone(),
        None => vec![1.0; n],
    };
    if !(options.ridge >= 0.0 && options.ridge.is_finite()) {
        return Err(Error::invalid(
            "ridge penalty must be finite and non-negative",
        ));
    }
    let intercept = x.intercept_index();
    let penalized: Vec<bool> = (0..p).map(|j| Some(j) != intercept).collect();
    let problem = Problem {
        family,
        rows: x.sparse_rows(),
        y,
        m,
        offset: x.offset().map_or_else(|| vec![0.0; n], <[f64]>::to_vec),
        p,
        penalized,
        ridge: options.ridge,
    };

    if options.ridge == 0.0 {
        let mut gram = Square::zeros(p);
        for i in 0..n {
            for (a, xa) in problem.rows.row(i) {
                for (b, xb) in problem.rows.row(i) {
                    if b >= a {
                        gram.a[a * p + b] += xa * xb;
                    }
                }
            }
        }
        gram.symmetrize_from_upper();
        let bad = dependent_columns(&gram);
        if !bad.is_empty() {
            return Err(Error::RankDeficient {
                columns: bad.into_iter().map(|j| x.names()[j].clone()).collect(),
            });
        }
    }

    let mu0: Vec<f64> = (0..n).map(|i| family.start(y[i], problem.m[i])).collect();
    let eta0: Vec<f64> = mu0.iter().map(|&mu| family.link(mu)).collect();
    let mut prev_dev = problem.deviance(&mu0);
    let mut current: Option<State> = None;
    let (mut eta, mut mu) = (eta0, mu0);
    let mut history = Vec::new();
    let mut converged = false;
    let mut diagnostic = None;
    let mut iterations = 0;
    let mut score_residual = f64::INFINITY;

    for iter in 1..=options.max_iterations {
        iterations = iter;
        let (h, g) = problem.normal_equations(&eta, &mu);
        let l = cholesky(&h).map_err(|_| rank_error(&h, x.names()))?;
        let mut next = problem.state(cholesky_solve(&l, &g));
        if let Some(cur) = &current {
            let limit = cur.deviance + 1e-12 * (cur.deviance.abs() + 1.0);
            let mut halvings = 0;
            while (next.deviance.is_nan() || next.deviance > limit) && halvings < 30 {
                let beta = cur
                    .beta
                    .iter()
                    .zip(&next.beta)
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                next = problem.state(beta);
                halvings += 1;
            }
            if next.deviance.is_nan() || next.deviance > limit {
                diagnostic = Some("step-halving failed to reduce the deviance".to_owned());
                break;
            }
        } else if !next.deviance.is_finite() {
            return Err(Error::invalid("IRLS diverged on the first step"));
        }
        history.push(next.deviance);
        score_residual = problem.score_residual(&next);
        let rel = (next.deviance - prev_dev).abs() / (next.deviance.abs() + 0.1);
        prev_dev = next.deviance;
        eta.clone_from(&next.eta);
        mu.clone_from(&next.mu);
        let separated = family == Family::Binomial
            && next.beta.iter().any(|b| b.abs() > options.separation_bound);
        current = Some(next);
        if separated {
            diagnostic = Some(format!(
                "a coefficient exceeded ±{} in magnitude; the classes look separated",
                options.separation_bound
            ));
            break;
        }
        if rel < options.tolerance && score_residual < options.score_tolerance {
            converged = true;
            break;
        }
    }
    let state = current.ok_or_else(|| Error::invalid("no IRLS iteration was run"))?;
    if !converged && diagnostic.is_none() {
        diagnostic = Some(format!(
            "no convergence after {} iterations",
            options.max_iterations
        ));
    }

    let resid_dev = problem.deviance(&state.mu);
    let dispersion = match family {
        Family::Gaussian => resid_dev / (n - p) as f64,
        _ => 1.0,
    };
    let (h, _) = problem.normal_equations(&state.eta, &state.mu);
    let standard_errors = match cholesky(&h) {
        Ok(l) => {
            let inv = cholesky_inverse(&l);
            (0..p).map(|j| (dispersion * inv.at(j, j)).sqrt()).collect()
        }
        Err(_) => vec![f64::NAN; p],
    };
    let normal = Normal::standard();
    let z_values: Vec<f64> = state
        .beta
        .iter()
        .zip(&standard_errors)
        .map(|(b, s)| b / s)
        .collect();
    let p_values = z_values
        .iter()
        .map(|z| {
            if z.is_nan() {
                f64::NAN
            } else {
                2.0 * normal.sf(z.abs())
            }
        })
        .collect();
    let log_likelihood = log_likelihood(family, y, &problem.m, &state.mu, resid_dev);

    Ok(GlmFit {
        family,
        names: x.names().to_vec(),
        coefficients: state.beta,
        standard_errors,
        z_values,
        p_values,
        deviance: resid_dev,
        log_likelihood,
        dispersion,
        iterations,
        converged,
        score_residual,
        deviance_history: history,
        diagnostic,
        n_obs: n,
        tolerance: options.tolerance,
        max_iterations: options.max_iterations,
        fitted: state.mu,
    })
}

fn log_likelihood(family: Family, y: &[f64], m: &[f64], mu: &[f64], deviance: f64) -> f64 {
    let n = y.len();
    match family {
        Family::Poisson => (0..n)
            .map(|i| {
                let yl = if y[i] == 0.0 { 0.0 } else { y[i] * mu[i].ln() };
                m[i] * (yl - mu[i] - ln_gamma(y[i] + 1.0))
            })
            .sum(),
        Family::Binomial => (0..n)
            .filter(|&i| m[i] > 0.0)
            .map(|i| {
                let k = m[i] * y[i];
                let comb = ln_gamma(m[i] + 1.0) - ln_gamma(k + 1.0) - ln_gamma(m[i] - k + 1.0);
                let a = if k == 0.0 { 0.0 } else { k * mu[i].ln() };
                let b = if m[i] - k == 0.0 {
                    0.0
                } else {
                    (m[i] - k) * (1.0 - mu[i]).ln()
                };
                comb + a + b
            })
            .sum(),
        Family::Gaussian => {
            let s2 = deviance / n as f64;
            -0.5 * (0..n)
                .filter(|&i| m[i] > 0.0)
                .map(|i| (2.0 * std::f64::consts::PI * s2 / m[i]).ln() + 1.0)
                .sum::<f64>()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn intercept_fit(y: &[f64], family: Family) -> GlmFit {
        fit_glm(
            &DesignMatrix::with_intercept(y.len()),
            y,
            family,
            &GlmOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn closed_form_intercepts() {
        let f = intercept_fit(&[1.0, 2.0, 3.0], Family::Poisson);
        assert!(f.converged);
        assert!((f.coefficients[0] - 2f64.ln()).abs() < 1e-8);
        let f = intercept_fit(&[1.0, 1.0, 0.0, 0.0], Family::Binomial);
        assert!(f.coefficients[0].abs() < 1e-10);
        let f = intercept_fit(&[1.0, 2.0, 6.0], Family::Gaussian);
        assert!((f.coefficients[0] - 3.0).abs() < 1e-12);
        assert!((f.dispersion - 7.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_offset_closed_form() {
        let mut x = DesignMatrix::with_intercept(2);
        x.set_offset(vec![1f64.ln(), 2f64.ln()]).unwrap();
        let f = fit_glm(&x, &[2.0, 4.0], Family::Poisson, &GlmOptions::default()).unwrap();
        assert!((f.coefficients[0] - 2f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn rank_deficiency_names_column() {
        let mut x = DesignMatrix::with_intercept(4);
        x.push_column("a", vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        x.push_column("b", vec![2.0, 4.0, 6.0, 8.0]).unwrap();
        match fit_glm(
            &x,
            &[1.0, 0.0, 2.0, 3.0],
            Family::Poisson,
            &GlmOptions::default(),
        ) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns, vec!["b".to_string()]),
            other => panic!("expected rank error, got {other:?}"),
        }
        let mut x = DesignMatrix::with_intercept(4);
        x.push_column("const", vec![5.0; 4]).unwrap();
        assert!(matches!(
            fit_glm(
                &x,
                &[1.0, 0.0, 2.0, 3.0],
                Family::Gaussian,
                &GlmOptions::default()
            ),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn separation_is_flagged() {
        let mut x = DesignMatrix::with_intercept(6);
        x.push_column("x", vec![-0.3, -0.2, -0.1, 0.1, 0.2, 0.3])
            .unwrap();
        let f = fit_glm(
            &x,
            &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            Family::Binomial,
            &GlmOptions::default(),
        )
        .unwrap();
        assert!(!f.converged);
        assert!(f.diagnostic.unwrap().contains("separated"));
    }

    #[test]
    fn gaussian_matches_least_squares() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.2, 4.8, 7.1, 9.0];
        let mut x = DesignMatrix::with_intercept(5);
        x.push_column("x", xs.to_vec()).unwrap();
        let f = fit_glm(&x, &y, Family::Gaussian, &GlmOptions::default()).unwrap();
        let xm = 2.0;
        let ym = y.iter().sum::<f64>() / 5.0;
        let sxy: f64 = xs.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
        let slope = sxy / 10.0;
        assert!((f.coef("x").unwrap() - slope).abs() < 1e-12);
        assert!((f.coef("(Intercept)").unwrap() - (ym - slope * xm)).abs() < 1e-12);
    }

    #[test]
    fn weighted_binomial_equals_expanded_bernoulli() {
        let mut x = DesignMatrix::with_intercept(3);
        x.push_column("x", vec![0.0, 1.0, 2.0]).unwrap();
        let opts = GlmOptions {
            weights: Some(vec![4.0, 5.0, 2.0]),
            ..Default::default()
        };
        let f = fit_glm(&x, &[0.25, 0.6, 0.5], Family::Binomial, &opts).unwrap();
        let mut xe = DesignMatrix::with_intercept(11);
        let xv = [0.0; 4]
            .into_iter()
            .chain([1.0; 5])
            .chain([2.0; 2])
            .collect();
        xe.push_column("x", xv).unwrap();
        let ye = [1., 0., 0., 0., 1., 1., 1., 0., 0., 1., 0.];
        let g = fit_glm(&xe, &ye, Family::Binomial, &GlmOptions::default()).unwrap();
        for j in 0..2 {
            assert!((f.coefficients[j] - g.coefficients[j]).abs() < 1e-9);
            assert!((f.standard_errors[j] - g.standard_errors[j]).abs() < 1e-9);
        }
    }

    /// Grid MLE over two coefficients with step 1e−3, searched coarse to fine
    /// around the best coarse cell.
    fn grid_mle(x: &[f64], y: &[f64]) -> (f64, f64) {
        let ll = |b0: f64, b1: f64| -> f64 {
            x.iter()
                .zip(y)
                .map(|(xi, yi)| {
                    let eta = b0 + b1 * xi;
                    yi * eta - eta.exp()
                })
                .sum()
        };
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        let coarse = 0.1;
        for i in -100..=100 {
            for j in -100..=100 {
                let (b0, b1) = (i as f64 * coarse, j as f64 * coarse);
                let v = ll(b0, b1);
                if v > best.0 {
                    best = (v, b0, b1);
                }
            }
        }
        let (c0, c1) = (best.1, best.2);
        let mut fine = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in -200..=200 {
            for j in -200..=200 {
                let (b0, b1) = (c0 + i as f64 * 1e-3, c1 + j as f64 * 1e-3);
                let v = ll(b0, b1);
                if v > fine.0 {
                    fine = (v, b0, b1);
                }
            }
        }
        (fine.1, fine.2)
    }

    #[test]
    fn poisson_matches_grid_mle() {
        let x = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        let y = [1.0, 0.0, 2.0, 3.0, 2.0, 6.0, 7.0];
        let mut d = DesignMatrix::with_intercept(7);
        d.push_column("x", x.to_vec()).unwrap();
        let f = fit_glm(&d, &y, Family::Poisson, &GlmOptions::default()).unwrap();
        let (g0, g1) = grid_mle(&x, &y);
        assert!((f.coefficients[0] - g0).abs() <= 1e-3 + 1e-12);
        assert!((f.coefficients[1] - g1).abs() <= 1e-3 + 1e-12);
    }

    #[test]
    fn ridge_shrinks_slope_only() {
        let mut x = DesignMatrix::with_intercept(6);
        x.push_column("x", vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])
            .unwrap();
        let y = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let opts = GlmOptions {
            ridge: 1.0,
            ..Default::default()
        };
        let f = fit_glm(&x, &y, Family::Binomial, &opts).unwrap();
        assert!(f.converged);
        assert!(f.coefficients[1] > 0.0 && f.coefficients[1] < 30.0);
        assert!(f.coefficients[0].abs() < 1e-9);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("poisson".parse::<Family>().unwrap(), Family::Poisson);
        assert_eq!("logistic".parse::<Family>().unwrap(), Family::Binomial);
        assert_eq!(Family::Gaussian.to_string(), "gaussian-identity");
        assert!("gamma".parse::<Family>().is_err());
    }

    fn poisson_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
        (8usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec(-1.5f64..1.5, n),
                proptest::collection::vec(-1.5f64..1.5, n),
                proptest::collection::vec(0u32..12, n),
                proptest::collection::vec(0.5f64..3.0, n),
            )
                .prop_map(|(a, b, y, e)| (a, b, y.into_iter().map(f64::from).collect(), e))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn score_equations_and_monotone_deviance((a, b, y, e) in poisson_case()) {
            prop_assume!(y.iter().any(|v| *v > 0.0));
            let n = y.len();
            let mut x = DesignMatrix::with_intercept(n);
            x.push_column("a", a.clone()).unwrap();
            x.push_column("b", b.clone()).unwrap();
            x.set_offset(e.iter().map(|v| v.ln()).collect()).unwrap();
            let f = match fit_glm(&x, &y, Family::Poisson, &GlmOptions::default()) {
                Ok(f) => f,
                Err(Error::RankDeficient { .. }) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            prop_assume!(f.converged);
            for j in 0..3 {
                let s: f64 = (0..n).map(|i| x.column(j)[i] * (y[i] - f.fitted[i])).sum();
                prop_assert!(s.abs() < 1e-6, "score {} = {}", j, s);
            }
            for w in f.deviance_history.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * (w[0].abs() + 1.0));
            }
        }

        #[test]
        fn fitted_means_invariant_to_standardizing((a, b, y, e) in poisson_case()) {
            prop_assume!(y.iter().any(|v| *v > 0.0));
            let n = y.len();
            let build = |a: Vec<f64>, b: Vec<f64>| {
                let mut x = DesignMatrix::with_intercept(n);
                x.push_column("a", a).unwrap();
                x.push_column("b", b).unwrap();
                x.set_offset(e.iter().map(|v| v.ln()).collect()).unwrap();
                x
            };
            let standardize = |v: &[f64]| {
                let m = v.iter().sum::<f64>() / n as f64;
                let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64).sqrt();
                v.iter().map(|x| (x - m) / s).collect::<Vec<_>>()
            };
            let opts = GlmOptions::default();
            let raw = fit_glm(&build(a.clone(), b.clone()), &y, Family::Poisson, &opts);
            let std = fit_glm(&build(standardize(&a), standardize(&b)), &y, Family::Poisson, &opts);
            if let (Ok(r), Ok(s)) = (raw, std) {
                prop_assume!(r.converged && s.converged);
                for (u, v) in r.fitted.iter().zip(&s.fitted) {
                    prop_assert!((u - v).abs() < 1e-8 * (1.0 + u.abs()));
                }
            }
        }
    }
}
