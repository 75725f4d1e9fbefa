//! Disagreement statistics and chance-corrected agreement.
//!
//! Every statistic is accumulated as an exact integer ratio and divided once
//! at the end, so results do not depend on summation order or platform.

mod agreement;
mod exact;

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotationSet, MentionIndex};
use crate::{Error, Result};

pub use agreement::{agreement_report, fleiss_kappa, pabak, AgreementReport, KappaResult};
pub(crate) use exact::exact_mean;

/// Fraction of coder pairs that disagree on an item with `n1` positive and
/// `n0` negative labels: `n1·n0 / C(n1+n0, 2)`.
pub fn item_disagreement(n1: u64, n0: u64) -> Result<f64> {
    let n = u128::from(n1) + u128::from(n0);
    if n < 2 {
        return Err(Error::invalid(format!(
            "item disagreement needs at least two labels, got {n}"
        )));
    }
    // n1·n0 / (n(n-1)/2) == 2·n1·n0 / (n(n-1))
    let num = 2 * u128::from(n1) * u128::from(n0);
    let den = n * (n - 1);
    Ok(num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisagreementSummary {
    pub item_id: String,
    pub n1: u64,
    pub n0: u64,
    pub d: f64,
}

/// Item disagreement for every item with at least two labels, in item order.
pub fn item_disagreements(annotations: &AnnotationSet) -> Vec<DisagreementSummary> {
    annotations
        .item_counts()
        .filter(|(_, c)| c.total() >= 2)
        .map(|(id, c)| DisagreementSummary {
            item_id: id.to_owned(),
            n1: c.n1,
            n0: c.n0,
            d: item_disagreement(c.n1, c.n0).expect("at least two labels"),
        })
        .collect()
}

/// Number of co-annotators of `item` whose label differs from `participant`'s,
/// and the number of co-annotators.
pub fn participant_item_counts(
    annotations: &AnnotationSet,
    participant: &str,
    item: &str,
) -> Result<(u64, u64)> {
    let own = annotations
        .label_of(participant, item)
        .ok_or_else(|| Error::invalid(format!("{participant} did not annotate item {item}")))?;
    let (mut differ, mut others) = (0u64, 0u64);
    for (a, l) in annotations.item_labels(item) {
        if a != participant {
            others += 1;
            differ += u64::from(l != own);
        }
    }
    if others == 0 {
        return Err(Error::invalid(format!(
            "item {item} has no annotators besides {participant}"
        )));
    }
    Ok((differ, others))
}

/// Fraction of the other annotators of `item` whose label differs from
/// `participant`'s.
pub fn participant_item_disagreement(
    annotations: &AnnotationSet,
    participant: &str,
    item: &str,
) -> Result<f64> {
    let (differ, others) = participant_item_counts(annotations, participant, item)?;
    Ok(differ as f64 / others as f64)
}

/// Unweighted mean of [`participant_item_disagreement`] over `items`.
pub fn group_level_disagreement<S: AsRef<str>>(
    annotations: &AnnotationSet,
    participant: &str,
    items: &[S],
) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::invalid(
            "group-level disagreement over an empty item set",
        ));
    }
    let fracs = items
        .iter()
        .map(|i| participant_item_counts(annotations, participant, i.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(exact_mean(
        fracs
            .into_iter()
            .map(|(a, b)| (u128::from(a), u128::from(b))),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantDisagreement {
    pub participant_id: String,
    pub item_id: String,
    pub d: f64,
    pub n_differing: u64,
    pub n_others: u64,
}

/// Participant item-level disagreement for every (annotator, item) pair that
/// has at least one co-annotator. Ordered by annotator, then item.
pub fn participant_disagreements(annotations: &AnnotationSet) -> Vec<ParticipantDisagreement> {
    let mut out = Vec::new();
    for p in annotations.annotator_ids() {
        for (item, _) in annotations.annotator_labels(p) {
            if let Ok((differ, others)) = participant_item_counts(annotations, p, item) {
                out.push(ParticipantDisagreement {
                    participant_id: p.to_owned(),
                    item_id: item.to_owned(),
                    d: differ as f64 / others as f64,
                    n_differing: differ,
                    n_others: others,
                });
            }
        }
    }
    out
}

/// Group-level disagreement of one participant on the items mentioning one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDisagreement {
    pub participant_id: String,
    pub group_id: String,
    pub d: f64,
    pub n_items: u64,
    /// Total co-annotator comparisons behind `d`.
    pub n_comparisons: u64,
}

/// Group-level disagreement for every (participant, group) with at least one
/// item that mentions the group and has co-annotators.
pub fn group_disagreements(
    annotations: &AnnotationSet,
    mentions: &MentionIndex,
    groups: &[String],
) -> Vec<GroupDisagreement> {
    let mut out = Vec::new();
    for p in annotations.annotator_ids() {
        for g in groups {
            let mut fracs = Vec::new();
            let mut comparisons = 0;
            for (item, _) in annotations.annotator_labels(p) {
                let mentioned = mentions.get(item).is_some_and(|gs| gs.contains(g));
                if !mentioned {
                    continue;
                }
                if let Ok((differ, others)) = participant_item_counts(annotations, p, item) {
                    comparisons += others;
                    fracs.push((u128::from(differ), u128::from(others)));
                }
            }
            if fracs.is_empty() {
                continue;
            }
            let n_items = fracs.len() as u64;
            out.push(GroupDisagreement {
                participant_id: p.to_owned(),
                group_id: g.clone(),
                d: exact_mean(fracs),
                n_items,
                n_comparisons: comparisons,
            });
        }
    }
    out
}
