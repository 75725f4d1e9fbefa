use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::corpus::MentionIndex;
use crate::{Error, Result};

/// A single model prediction on a test item in one iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub iteration: usize,
    pub item_id: String,
    pub predicted: u8,
    pub majority: u8,
}

/// Denominator of the error ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// False positives over negatives, false negatives over positives.
    #[default]
    ClassConditional,
    /// Both over all prediction instances mentioning the group.
    Total,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgtErrorStats {
    pub group_id: String,
    pub n_total: u64,
    pub n_neg: u64,
    pub n_pos: u64,
    pub n_fp: u64,
    pub n_fn: u64,
    /// `None` when the denominator is zero.
    pub fp_ratio: Option<f64>,
    pub fn_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    neg: u64,
    pos: u64,
    fp: u64,
    fneg: u64,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Per-group error tallies over prediction instances. Each instance counts
/// once for every group its item mentions; items without mentions add
/// nothing. Groups are reported in order of first appearance in `mentions`.
pub fn tally_errors(
    predictions: &[PredictionRecord],
    mentions: &MentionIndex,
    denominator: Denominator,
) -> Result<Vec<SgtErrorStats>> {
    let mut counts: IndexMap<&str, Counts> = IndexMap::new();
    for groups in mentions.values() {
        for g in groups {
            counts.entry(g.as_str()).or_default();
        }
    }
    for p in predictions {
        if p.predicted > 1 || p.majority > 1 {
            return Err(Error::invalid(format!(
                "prediction for item {} in iteration {} has a non-binary label",
                p.item_id, p.iteration
            )));
        }
        let groups = mentions
            .get(&p.item_id)
            .ok_or_else(|| Error::UnknownItem(p.item_id.clone()))?;
        for g in groups {
            let c = counts.get_mut(g.as_str()).expect("group registered above");
            match (p.majority, p.predicted) {
                (0, 0) => c.neg += 1,
                (0, _) => {
                    c.neg += 1;
                    c.fp += 1;
                }
                (_, 1) => c.pos += 1,
                _ => {
                    c.pos += 1;
                    c.fneg += 1;
                }
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|(g, c)| {
            let total = c.neg + c.pos;
            let (fp_den, fn_den) = match denominator {
                Denominator::ClassConditional => (c.neg, c.pos),
                Denominator::Total => (total, total),
            };
            SgtErrorStats {
                group_id: g.to_owned(),
                n_total: total,
                n_neg: c.neg,
                n_pos: c.pos,
                n_fp: c.fp,
                n_fn: c.fneg,
                fp_ratio: ratio(c.fp, fp_den),
                fn_ratio: ratio(c.fneg, fn_den),
            }
        })
        .collect())
}

/// Read `iteration,item_id,predicted,majority` CSV.
pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<PredictionRecord>().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if rec.predicted > 1 || rec.majority > 1 {
            return Err(Error::parse(path, line, "labels must be 0 or 1"));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn predictions_to_csv(records: &[PredictionRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}

pub fn stats_to_csv(stats: &[SgtErrorStats]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in stats {
        w.serialize(s).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}
