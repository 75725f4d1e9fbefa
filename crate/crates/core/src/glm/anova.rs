use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::linalg::{cholesky, cholesky_solve, Square};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub source: String,
    pub ss: f64,
    pub df: f64,
    /// `None` on the residual row.
    pub f: Option<f64>,
    pub p: Option<f64>,
}

/// Rows in the order A, B, A×B, Residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub rows: Vec<AnovaRow>,
}

impl AnovaTable {
    pub fn row(&self, source: &str) -> Option<&AnovaRow> {
        self.rows.iter().find(|r| r.source == source)
    }
}

/// Residual sum of squares of `y` on the first `p` columns of `x`.
fn rss(x: &[[f64; 4]], y: &[f64], p: usize) -> Result<f64> {
    let mut h = Square::zeros(p);
    let mut g = vec![0.0; p];
    for (row, yi) in x.iter().zip(y) {
        for a in 0..p {
            g[a] += row[a] * yi;
            for b in 0..p {
                *h.at_mut(a, b) += row[a] * row[b];
            }
        }
    }
    let l = cholesky(&h).map_err(|_| Error::invalid("ANOVA design is rank deficient"))?;
    let beta = cholesky_solve(&l, &g);
    Ok(x.iter()
        .zip(y)
        .map(|(row, yi)| {
            let fit: f64 = (0..p).map(|j| row[j] * beta[j]).sum();
            (yi - fit).powi(2)
        })
        .sum())
}

/// Two-way ANOVA for binary factors with Type I (sequential) sums of squares
/// in the order A, B, A×B.
pub fn two_way_anova(y: &[f64], factor_a: &[bool], factor_b: &[bool]) -> Result<AnovaTable> {
    let n = y.len();
    if factor_a.len() != n || factor_b.len() != n {
        return Err(Error::invalid("factor lengths differ from the response"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("ANOVA response must be finite"));
    }
    let mut cells = [0usize; 4];
    for (a, b) in factor_a.iter().zip(factor_b) {
        cells[usize::from(*a) * 2 + usize::from(*b)] += 1;
    }
    if let Some(c) = cells.iter().position(|c| *c == 0) {
        return Err(Error::invalid(format!(
            "empty cell (A = {}, B = {}) in the 2×2 design",
            c / 2,
            c % 2
        )));
    }
    if n <= 4 {
        return Err(Error::invalid(
            "ANOVA needs at least one residual degree of freedom",
        ));
    }
    let x: Vec<[f64; 4]> = factor_a
        .iter()
        .zip(factor_b)
        .map(|(&a, &b)| {
            let (a, b) = (f64::from(u8::from(a)), f64::from(u8::from(b)));
            [1.0, a, b, a * b]
        })
        .collect();
    let r: Vec<f64> = (1..=4).map(|p| rss(&x, y, p)).collect::<Result<_>>()?;
    let df_res = (n - 4) as f64;
    let ms_res = r[3] / df_res;
    let dist = FisherSnedecor::new(1.0, df_res)
        .map_err(|e| Error::invalid(format!("F distribution: {e}")))?;
    let mut rows = Vec::with_capacity(4);
    for (k, source) in ["A", "B", "A:B"].into_iter().enumerate() {
        let ss = (r[k] - r[k + 1]).max(0.0);
        let f = ss / ms_res;
        rows.push(AnovaRow {
            source: source.to_owned(),
            ss,
            df: 1.0,
            f: Some(f),
            p: Some(if f.is_nan() { f64::NAN } else { dist.sf(f) }),
        });
    }
    rows.push(AnovaRow {
        source: "Residuals".to_owned(),
        ss: r[3],
        df: df_res,
        f: None,
        p: None,
    });
    Ok(AnovaTable { rows })
}
