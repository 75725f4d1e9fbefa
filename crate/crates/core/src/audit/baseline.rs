use serde::{Deserialize, Serialize};

use crate::corpus::tokenize;
use crate::glm::{fit_glm, DesignMatrix, Family, GlmOptions};
use crate::stereotype::EmbeddingTable;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineOptions {
    /// L2 penalty on the weights (not the bias).
    pub ridge: f64,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        Self { ridge: 1.0 }
    }
}

/// Logistic regression on the mean word vector of a text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub ridge: f64,
    pub iterations: usize,
    pub converged: bool,
    pub n_train: usize,
}

impl BaselineModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Label of a precomputed feature vector: 1 iff `w·x + b ≥ 0`, that is
    /// iff the predicted probability is at least one half.
    pub fn predict_features(&self, x: &[f64]) -> u8 {
        let eta: f64 = self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        u8::from(eta >= 0.0)
    }

    pub(crate) fn fit(
        features: &[&[f64]],
        labels: &[u8],
        options: BaselineOptions,
    ) -> Result<Self> {
        let n = features.len();
        if labels.len() != n {
            return Err(Error::invalid("feature and label counts differ"));
        }
        if !labels.contains(&0) || !labels.contains(&1) {
            return Err(Error::invalid(
                "baseline training needs at least one example of each class",
            ));
        }
        let dim = features.first().map_or(0, |f| f.len());
        let mut x = DesignMatrix::with_intercept(n);
        for j in 0..dim {
            x.push_column(format!("x{j}"), features.iter().map(|f| f[j]).collect())?;
        }
        let y: Vec<f64> = labels.iter().map(|l| f64::from(*l)).collect();
        let opts = GlmOptions {
            ridge: options.ridge,
            ..GlmOptions::default()
        };
        let fit = fit_glm(&x, &y, Family::Binomial, &opts)?;
        Ok(Self {
            bias: fit.coefficients[0],
            weights: fit.coefficients[1..].to_vec(),
            ridge: options.ridge,
            iterations: fit.iterations,
            converged: fit.converged,
            n_train: n,
        })
    }
}

/// Mean of the in-vocabulary token vectors of `text`, or zeros.
pub fn featurize(text: &str, table: &EmbeddingTable) -> Vec<f64> {
    table
        .mean_vector(&tokenize(text))
        .unwrap_or_else(|| vec![0.0; table.dim()])
}

pub fn train_baseline(
    examples: &[(&str, u8)],
    table: &EmbeddingTable,
    options: BaselineOptions,
) -> Result<BaselineModel> {
    let feats: Vec<Vec<f64>> = examples.iter().map(|(t, _)| featurize(t, table)).collect();
    let refs: Vec<&[f64]> = feats.iter().map(Vec::as_slice).collect();
    let labels: Vec<u8> = examples.iter().map(|(_, l)| *l).collect();
    BaselineModel::fit(&refs, &labels, options)
}

pub fn predict_baseline(model: &BaselineModel, text: &str, table: &EmbeddingTable) -> u8 {
    model.predict_features(&featurize(text, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (EmbeddingTable, Vec<(String, u8)>) {
        let table = EmbeddingTable::from_entries([
            ("hate".to_string(), vec![1.0, 0.2]),
            ("vile".to_string(), vec![0.9, -0.1]),
            ("nice".to_string(), vec![-1.0, 0.1]),
            ("kind".to_string(), vec![-0.8, -0.3]),
            ("the".to_string(), vec![0.05, 0.9]),
        ])
        .unwrap();
        let ex = vec![
            ("hate the".to_string(), 1),
            ("vile".to_string(), 1),
            ("hate vile".to_string(), 1),
            ("the hate the".to_string(), 1),
            ("nice".to_string(), 0),
            ("kind the".to_string(), 0),
            ("nice kind".to_string(), 0),
            ("the nice the".to_string(), 0),
        ];
        (table, ex)
    }

    #[test]
    fn separable_set_is_learned() {
        let (table, ex) = fixture();
        let refs: Vec<(&str, u8)> = ex.iter().map(|(t, l)| (t.as_str(), *l)).collect();
        let m = train_baseline(&refs, &table, BaselineOptions::default()).unwrap();
        assert!(m.converged);
        assert_eq!(m.dim(), 2);
        for (t, l) in &refs {
            assert_eq!(predict_baseline(&m, t, &table), *l, "{t}");
        }
    }

    #[test]
    fn flipped_labels_negate_the_model() {
        let (table, ex) = fixture();
        let refs: Vec<(&str, u8)> = ex.iter().map(|(t, l)| (t.as_str(), *l)).collect();
        let flipped: Vec<(&str, u8)> = refs.iter().map(|(t, l)| (*t, 1 - l)).collect();
        let a = train_baseline(&refs, &table, BaselineOptions::default()).unwrap();
        let b = train_baseline(&flipped, &table, BaselineOptions::default()).unwrap();
        for (u, v) in a.weights.iter().zip(&b.weights) {
            assert!((u + v).abs() < 1e-8);
        }
        assert!((a.bias + b.bias).abs() < 1e-8);
    }

    #[test]
    fn out_of_vocabulary_text_uses_bias() {
        let (table, ex) = fixture();
        let refs: Vec<(&str, u8)> = ex.iter().map(|(t, l)| (t.as_str(), *l)).collect();
        let m = train_baseline(&refs, &table, BaselineOptions::default()).unwrap();
        assert_eq!(
            predict_baseline(&m, "zzz qqq", &table),
            u8::from(m.bias >= 0.0)
        );
        let zero = BaselineModel { bias: 0.0, ..m };
        assert_eq!(zero.predict_features(&[0.0, 0.0]), 1);
    }

    #[test]
    fn single_class_rejected() {
        let (table, _) = fixture();
        assert!(train_baseline(
            &[("hate", 1), ("vile", 1)],
            &table,
            BaselineOptions::default()
        )
        .is_err());
    }
}
