use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tally::SgtErrorStats;
use crate::glm::{fit_glm, rate_ratio, DesignMatrix, Family, GlmFit, GlmOptions};
use crate::stereotype::StereotypeScore;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Fp,
    Fn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predictor {
    Warmth,
    Competence,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Fp => "fp",
            ErrorKind::Fn => "fn",
        })
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predictor::Warmth => "warmth",
            Predictor::Competence => "competence",
        })
    }
}

impl FromStr for ErrorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fp" => Ok(ErrorKind::Fp),
            "fn" => Ok(ErrorKind::Fn),
            other => Err(Error::invalid(format!("unknown error kind '{other}'"))),
        }
    }
}

impl FromStr for Predictor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "warmth" => Ok(Predictor::Warmth),
            "competence" => Ok(Predictor::Competence),
            other => Err(Error::invalid(format!("unknown predictor '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasAssociation {
    pub error_kind: ErrorKind,
    pub predictor: Predictor,
    pub groups: Vec<String>,
    pub beta: f64,
    pub se: f64,
    pub p_value: f64,
    /// Percent change in the expected error count per unit of the predictor.
    pub percent_change: f64,
    pub fit: GlmFit,
}

/// Poisson regression of a group's error count on one stereotype dimension,
/// with `log(n_total)` as offset. Groups without predictions or without a
/// score are left out.
pub fn associate_bias(
    stats: &[SgtErrorStats],
    scores: &[StereotypeScore],
    error_kind: ErrorKind,
    predictor: Predictor,
) -> Result<BiasAssociation> {
    let mut groups = Vec::new();
    let mut y = Vec::new();
    let mut xs = Vec::new();
    let mut offset = Vec::new();
    for s in stats.iter().filter(|s| s.n_total > 0) {
        let Some(score) = scores.iter().find(|c| c.group_id == s.group_id) else {
            continue;
        };
        groups.push(s.group_id.clone());
        y.push(match error_kind {
            ErrorKind::Fp => s.n_fp as f64,
            ErrorKind::Fn => s.n_fn as f64,
        });
        xs.push(match predictor {
            Predictor::Warmth => score.warmth,
            Predictor::Competence => score.competence,
        });
        offset.push((s.n_total as f64).ln());
    }
    if groups.len() < 3 {
        return Err(Error::invalid(format!(
            "bias association needs at least 3 scored groups with predictions, found {}",
            groups.len()
        )));
    }
    let mut x = DesignMatrix::with_intercept(groups.len());
    x.push_column(predictor.to_string(), xs)?;
    x.set_offset(offset)?;
    let fit = fit_glm(&x, &y, Family::Poisson, &GlmOptions::default())?;
    Ok(BiasAssociation {
        error_kind,
        predictor,
        groups,
        beta: fit.coefficients[1],
        se: fit.standard_errors[1],
        p_value: fit.p_values[1],
        percent_change: rate_ratio(fit.coefficients[1]),
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stat(g: &str, total: u64, fp: u64) -> SgtErrorStats {
        SgtErrorStats {
            group_id: g.into(),
            n_total: total,
            n_neg: total,
            n_pos: 0,
            n_fp: fp,
            n_fn: 0,
            fp_ratio: None,
            fn_ratio: None,
        }
    }

    fn score(g: &str, w: f64, c: f64) -> StereotypeScore {
        StereotypeScore {
            group_id: g.into(),
            surface_form: g.into(),
            warmth: w,
            competence: c,
            warmth_coverage: 1.0,
            competence_coverage: 1.0,
        }
    }

    #[test]
    fn constant_scores_are_collinear() {
        let stats = [stat("a", 10, 2), stat("b", 20, 3), stat("c", 15, 1)];
        let scores = [
            score("a", 0.1, 0.2),
            score("b", 0.1, 0.3),
            score("c", 0.1, 0.4),
        ];
        match associate_bias(&stats, &scores, ErrorKind::Fp, Predictor::Warmth) {
            Err(Error::RankDeficient { columns }) => {
                assert_eq!(columns, vec!["warmth".to_string()])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_gradient_is_recovered() {
        let comp: [f64; 7] = [-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3];
        let stats: Vec<SgtErrorStats> = comp
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let total = 1000;
                let rate = 0.2 * (-4.0 * c).exp();
                stat(
                    &format!("g{i}"),
                    total,
                    (rate * total as f64).round() as u64,
                )
            })
            .collect();
        let scores: Vec<StereotypeScore> = comp
            .iter()
            .enumerate()
            .map(|(i, c)| score(&format!("g{i}"), 0.0, *c))
            .collect();
        let a = associate_bias(&stats, &scores, ErrorKind::Fp, Predictor::Competence).unwrap();
        assert!((a.beta + 4.0).abs() < 0.05);
        assert!(a.p_value < 1e-6);
        assert_eq!(a.groups.len(), 7);
    }

    #[test]
    fn too_few_groups() {
        let stats = [stat("a", 10, 2), stat("b", 0, 0), stat("c", 15, 1)];
        let scores = [
            score("a", 0.1, 0.2),
            score("b", 0.2, 0.3),
            score("c", 0.3, 0.4),
        ];
        assert!(associate_bias(&stats, &scores, ErrorKind::Fp, Predictor::Warmth).is_err());
    }
}
