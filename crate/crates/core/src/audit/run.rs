use serde::{Deserialize, Serialize};

use super::baseline::{featurize, BaselineModel, BaselineOptions};
use super::splits::make_splits;
use super::tally::{tally_errors, Denominator, PredictionRecord, SgtErrorStats};
use crate::corpus::{AnnotationSet, MentionIndex, PostTable};
use crate::stereotype::EmbeddingTable;
use crate::{Error, Execution, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub train_fraction: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Keep tied items, labelled negative. They are dropped otherwise.
    pub include_ties: bool,
    pub baseline: BaselineOptions,
    pub denominator: Denominator,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            iterations: 100,
            seed: 0,
            include_ties: false,
            baseline: BaselineOptions::default(),
            denominator: Denominator::ClassConditional,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditOutcome {
    pub config: AuditConfig,
    pub n_items: usize,
    pub n_ties_excluded: usize,
    pub n_items_without_text: usize,
    /// Test-set accuracy of the baseline per iteration.
    pub accuracy: Vec<f64>,
    pub n_unconverged_fits: usize,
    pub stats: Vec<SgtErrorStats>,
    #[serde(skip)]
    pub predictions: Vec<PredictionRecord>,
}

/// Split, train, predict and tally for every iteration. Each iteration
/// depends only on `(config.seed, iteration)`, so the outcome is the same
/// under either execution strategy.
pub fn run_audit(
    annotations: &AnnotationSet,
    posts: &PostTable,
    mentions: &MentionIndex,
    table: &EmbeddingTable,
    config: &AuditConfig,
    exec: Execution,
) -> Result<AuditOutcome> {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut texts = Vec::new();
    let (mut ties, mut missing) = (0, 0);
    for m in annotations.majority_labels() {
        if m.tied && !config.include_ties {
            ties += 1;
            continue;
        }
        let Some(text) = posts.get(&m.item_id) else {
            missing += 1;
            continue;
        };
        ids.push(m.item_id);
        labels.push(m.label);
        texts.push(text);
    }
    if ids.is_empty() {
        return Err(Error::invalid("no annotated item has post text"));
    }
    let features: Vec<Vec<f64>> = exec.map_slice(&texts, |t| featurize(t, table));
    let plan = make_splits(
        ids.len(),
        config.train_fraction,
        config.iterations,
        config.seed,
    )?;

    let per_iter = exec.try_map_range(plan.splits.len(), |k| {
        let split = &plan.splits[k];
        let f: Vec<&[f64]> = split
            .train
            .iter()
            .map(|&i| features[i].as_slice())
            .collect();
        let l: Vec<u8> = split.train.iter().map(|&i| labels[i]).collect();
        let model = BaselineModel::fit(&f, &l, config.baseline)
            .map_err(|e| Error::invalid(format!("iteration {k}: {e}")))?;
        let preds: Vec<PredictionRecord> = split
            .test
            .iter()
            .map(|&i| PredictionRecord {
                iteration: k,
                item_id: ids[i].clone(),
                predicted: model.predict_features(&features[i]),
                majority: labels[i],
            })
            .collect();
        let correct = preds.iter().filter(|p| p.predicted == p.majority).count();
        let acc = correct as f64 / preds.len() as f64;
        Ok::<_, Error>((preds, acc, model.converged))
    })?;

    let mut predictions = Vec::with_capacity(per_iter.iter().map(|p| p.0.len()).sum());
    let mut accuracy = Vec::with_capacity(per_iter.len());
    let mut unconverged = 0;
    for (p, a, c) in per_iter {
        predictions.extend(p);
        accuracy.push(a);
        unconverged += usize::from(!c);
    }
    let stats = tally_errors(&predictions, mentions, config.denominator)?;
    Ok(AuditOutcome {
        config: config.clone(),
        n_items: ids.len(),
        n_ties_excluded: ties,
        n_items_without_text: missing,
        accuracy,
        n_unconverged_fits: unconverged,
        stats,
        predictions,
    })
}
