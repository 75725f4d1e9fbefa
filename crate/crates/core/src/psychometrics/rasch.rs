use serde::{Deserialize, Serialize};

use super::esf::ScaledEsf;
use super::ResponseMatrix;
use crate::exec::Execution;
use crate::linalg::{cholesky, cholesky_inverse, cholesky_solve, Square};
use crate::{Error, Result};

/// Search interval for person tendencies.
pub const THETA_BRACKET: (f64, f64) = (-30.0, 30.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaschOptions {
    /// Convergence threshold on the largest absolute score component.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RaschOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 500,
        }
    }
}

/// Conditional-ML item fit. Difficulties are normalized to sum to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaschFit {
    pub item_ids: Vec<String>,
    pub difficulties: Vec<f64>,
    /// Asymptotic standard errors under the sum-zero constraint.
    pub standard_errors: Vec<f64>,
    pub log_conditional_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub max_abs_gradient: f64,
    pub n_persons_used: usize,
    /// Persons with zero or perfect raw scores; they carry no information
    /// about item difficulties and are left out of the conditional likelihood.
    pub excluded_persons: Vec<String>,
}

/// Sufficient statistics of the conditional likelihood.
struct CmlData {
    /// Number of informative persons with raw score r, indexed 0..=k.
    score_counts: Vec<f64>,
    /// Number of 1-responses per item among informative persons.
    item_scores: Vec<f64>,
}

impl CmlData {
    fn k(&self) -> usize {
        self.item_scores.len()
    }

    fn log_likelihood(&self, delta: &[f64]) -> f64 {
        let log_eps: Vec<f64> = delta.iter().map(|d| -d).collect();
        let full = ScaledEsf::from_log_eps(&log_eps, &[]);
        self.ll_with(&full, delta)
    }

    fn ll_with(&self, full: &ScaledEsf, delta: &[f64]) -> f64 {
        let linear: f64 = self
            .item_scores
            .iter()
            .zip(delta)
            .map(|(s, d)| -s * d)
            .sum();
        let norm: f64 = self
            .score_counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0.0)
            .map(|(r, &n)| n * full.ln(r as isize))
            .sum();
        linear - norm
    }

    /// Log-likelihood, gradient in δ and the information matrix.
    fn evaluate(&self, delta: &[f64]) -> (f64, Vec<f64>, Square) {
        let k = self.k();
        let log_eps: Vec<f64> = delta.iter().map(|d| -d).collect();
        let full = ScaledEsf::from_log_eps(&log_eps, &[]);
        let ll = self.ll_with(&full, delta);
        let scores: Vec<usize> = (1..k).filter(|&r| self.score_counts[r] > 0.0).collect();

        // pi[j][r] = P(X_j = 1 | raw score r)
        let pi: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let loo = ScaledEsf::from_log_eps(&log_eps, &[j]);
                let mut row = vec![0.0; k + 1];
                for &r in &scores {
                    row[r] = (log_eps[j] + loo.ln(r as isize - 1) - full.ln(r as isize)).exp();
                }
                row
            })
            .collect();

        let grad: Vec<f64> = (0..k)
            .map(|j| {
                let expected: f64 = scores
                    .iter()
                    .map(|&r| self.score_counts[r] * pi[j][r])
                    .sum();
                expected - self.item_scores[j]
            })
            .collect();

        let mut info = Square::zeros(k);
        for j in 0..k {
            *info.at_mut(j, j) = scores
                .iter()
                .map(|&r| self.score_counts[r] * pi[j][r] * (1.0 - pi[j][r]))
                .sum();
            for l in j + 1..k {
                let loo2 = ScaledEsf::from_log_eps(&log_eps, &[j, l]);
                *info.at_mut(j, l) = scores
                    .iter()
                    .map(|&r| {
                        let joint = (log_eps[j] + log_eps[l] + loo2.ln(r as isize - 2)
                            - full.ln(r as isize))
                        .exp();
                        self.score_counts[r] * (joint - pi[j][r] * pi[l][r])
                    })
                    .sum();
            }
        }
        info.symmetrize_from_upper();
        (ll, grad, info)
    }
}

fn prepare(matrix: &ResponseMatrix) -> Result<(CmlData, Vec<String>)> {
    if !matrix.is_complete() {
        return Err(Error::invalid(
            "conditional Rasch fit needs a complete response matrix; fit complete item blocks",
        ));
    }
    let k = matrix.n_items();
    let mut score_counts = vec![0.0; k + 1];
    let mut item_scores = vec![0.0; k];
    let mut excluded = Vec::new();
    for p in 0..matrix.n_persons() {
        let row = matrix.row(p);
        let r: usize = row.iter().map(|v| usize::from(v.unwrap_or(0))).sum();
        if r == 0 || r == k {
            excluded.push(matrix.person_ids()[p].clone());
            continue;
        }
        score_counts[r] += 1.0;
        for (j, v) in row.iter().enumerate() {
            item_scores[j] += f64::from(v.unwrap_or(0));
        }
    }
    let informative: f64 = score_counts.iter().sum();
    if informative == 0.0 {
        return Err(Error::invalid(
            "every person has a zero or perfect raw score; difficulties are not estimable",
        ));
    }
    if let Some(j) = item_scores
        .iter()
        .position(|&s| s == 0.0 || s == informative)
    {
        return Err(Error::ConstantItem {
            item: matrix.item_ids()[j].clone(),
        });
    }
    Ok((
        CmlData {
            score_counts,
            item_scores,
        },
        excluded,
    ))
}

/// Fit item difficulties by conditional maximum likelihood, starting from
/// centered log-odds of the item scores.
pub fn fit_rasch_cml(matrix: &ResponseMatrix, options: &RaschOptions) -> Result<RaschFit> {
    let (data, _) = prepare(matrix)?;
    let n: f64 = data.score_counts.iter().sum();
    let start: Vec<f64> = data
        .item_scores
        .iter()
        .map(|&s| ((n - s) / s).ln())
        .collect();
    fit_rasch_cml_from(matrix, &start, options)
}

/// [`fit_rasch_cml`] from a caller-supplied starting point.
pub fn fit_rasch_cml_from(
    matrix: &ResponseMatrix,
    start: &[f64],
    options: &RaschOptions,
) -> Result<RaschFit> {
    let (data, excluded) = prepare(matrix)?;
    let k = data.k();
    if start.len() != k || start.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(
            "starting difficulties must be finite, one per item",
        ));
    }
    // item 0 is the reference during optimization
    let mut delta: Vec<f64> = start.iter().map(|d| d - start[0]).collect();

    let mut iterations = 0;
    let mut converged = false;
    let (mut ll, mut grad, mut info) = data.evaluate(&delta);
    loop {
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax < options.tolerance {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        let reduced = reduce(&info);
        let Ok(l) = cholesky(&reduced) else {
            break;
        };
        let step = cholesky_solve(&l, &grad[1..]);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut cand = delta.clone();
            for (c, s) in cand[1..].iter_mut().zip(&step) {
                *c += t * s;
            }
            let ll_c = data.log_likelihood(&cand);
            if ll_c.is_finite() && ll_c >= ll - 1e-12 * ll.abs() {
                delta = cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        (ll, grad, info) = data.evaluate(&delta);
    }
    let max_abs_gradient = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));

    let mean = delta.iter().sum::<f64>() / k as f64;
    let difficulties: Vec<f64> = delta.iter().map(|d| d - mean).collect();
    let standard_errors = sum_zero_standard_errors(&info);

    Ok(RaschFit {
        item_ids: matrix.item_ids().to_vec(),
        difficulties,
        standard_errors,
        log_conditional_likelihood: ll,
        iterations,
        converged,
        max_abs_gradient,
        n_persons_used: data.score_counts.iter().sum::<f64>() as usize,
        excluded_persons: excluded,
    })
}

/// Drop row and column 0.
fn reduce(info: &Square) -> Square {
    let k = info.n;
    let mut r = Square::zeros(k - 1);
    for i in 1..k {
        for j in 1..k {
            *r.at_mut(i - 1, j - 1) = info.at(i, j);
        }
    }
    r
}

/// Covariance of the reference-coded estimate, mapped through the centering
/// projection `A = I − J/k`.
fn sum_zero_standard_errors(info: &Square) -> Vec<f64> {
    let k = info.n;
    let Ok(l) = cholesky(&reduce(info)) else {
        return vec![f64::NAN; k];
    };
    let inv = cholesky_inverse(&l);
    let v = |i: usize, j: usize| -> f64 {
        if i == 0 || j == 0 {
            0.0
        } else {
            inv.at(i - 1, j - 1)
        }
    };
    let kf = k as f64;
    let row_mean: Vec<f64> = (0..k)
        .map(|i| (0..k).map(|j| v(i, j)).sum::<f64>() / kf)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / kf;
    (0..k)
        .map(|j| (v(j, j) - 2.0 * row_mean[j] + grand).max(0.0).sqrt())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonTendency {
    pub person_id: String,
    pub theta: f64,
    pub raw_score: u32,
    pub n_answered: u32,
    /// Zero or perfect raw score; `theta` uses the 0.5-corrected score.
    pub extremal: bool,
}

/// Maximum-likelihood tendency of every person given fixed difficulties.
///
/// Each person's estimate solves `r = Σ_j logistic(θ − δ_j)` over the items
/// they answered. Zero and perfect scores are moved half a point inward and
/// flagged.
pub fn estimate_tendencies(
    matrix: &ResponseMatrix,
    difficulties: &[f64],
) -> Result<Vec<PersonTendency>> {
    if difficulties.len() != matrix.n_items() {
        return Err(Error::invalid(format!(
            "{} difficulties for {} items",
            difficulties.len(),
            matrix.n_items()
        )));
    }
    if difficulties.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("difficulties must be finite"));
    }
    let mut out = Vec::with_capacity(matrix.n_persons());
    for p in 0..matrix.n_persons() {
        let mut deltas = Vec::new();
        let mut r = 0u32;
        for (j, v) in matrix.row(p).iter().enumerate() {
            if let Some(v) = v {
                deltas.push(difficulties[j]);
                r += u32::from(*v);
            }
        }
        let k = deltas.len() as u32;
        let extremal = r == 0 || r == k;
        let target = f64::from(r).clamp(0.5, f64::from(k) - 0.5);
        out.push(PersonTendency {
            person_id: matrix.person_ids()[p].clone(),
            theta: solve_theta(&deltas, target),
            raw_score: r,
            n_answered: k,
            extremal,
        });
    }
    Ok(out)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Root of `Σ logistic(θ − δ_j) = target`: bisection to narrow the bracket,
/// then safeguarded Newton.
fn solve_theta(deltas: &[f64], target: f64) -> f64 {
    let f = |t: f64| deltas.iter().map(|d| logistic(t - d)).sum::<f64>() - target;
    let (mut lo, mut hi) = THETA_BRACKET;
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (mut val, mut slope) = (-target, 0.0);
        for d in deltas {
            let p = logistic(t - d);
            val += p;
            slope += p * (1.0 - p);
        }
        if val < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t - val / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() < 1e-13 {
            return next;
        }
        t = next;
    }
    t
}

/// One item block's fit; `error` is set instead of `fit` when the block could
/// not be estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockFit {
    pub block: String,
    pub fit: Option<RaschFit>,
    pub tendencies: Vec<PersonTendency>,
    pub error: Option<String>,
}

/// Fit a separate model on each block of item columns (e.g. the items that
/// mention one social group), using the persons who answered the whole block.
pub fn fit_rasch_blocks(
    matrix: &ResponseMatrix,
    blocks: &[(String, Vec<usize>)],
    options: &RaschOptions,
    exec: Execution,
) -> Vec<BlockFit> {
    exec.map_slice(blocks, |(name, items)| {
        let attempt = matrix.complete_block(items).and_then(|sub| {
            let fit = fit_rasch_cml(&sub, options)?;
            let tendencies = estimate_tendencies(&sub, &fit.difficulties)?;
            Ok((fit, tendencies))
        });
        match attempt {
            Ok((fit, tendencies)) => BlockFit {
                block: name.clone(),
                fit: Some(fit),
                tendencies,
                error: None,
            },
            Err(e) => BlockFit {
                block: name.clone(),
                fit: None,
                tendencies: Vec::new(),
                error: Some(e.to_string()),
            },
        }
    })
}
