//! End-to-end analyses that combine the modules: the per-participant,
//! per-group table with its count and disagreement regressions, and the
//! disagreement contrast between majority-hate and majority-non-hate items.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotationSet, MentionIndex};
use crate::disagreement::{group_disagreements, item_disagreement};
use crate::glm::{
    fit_glm, permutation_test, DesignMatrix, Family, GlmFit, GlmOptions, PermutationResult,
    Statistic,
};
use crate::psychometrics::{fit_rasch_blocks, RaschOptions, ResponseMatrix};
use crate::stereotype::ExplicitComposite;
use crate::{Error, Execution, Result};

/// Annotators × items matrix of labels, missing where an annotator did not
/// label an item.
pub fn response_matrix(annotations: &AnnotationSet) -> Result<ResponseMatrix> {
    let persons: Vec<String> = annotations.annotator_ids().map(str::to_owned).collect();
    let items: Vec<String> = annotations.item_ids().map(str::to_owned).collect();
    let col: HashMap<&str, usize> = items
        .iter()
        .enumerate()
        .map(|(j, i)| (i.as_str(), j))
        .collect();
    let rows = persons
        .iter()
        .map(|p| {
            let mut row = vec![None; items.len()];
            for (item, label) in annotations.annotator_labels(p) {
                row[col[item]] = Some(label);
            }
            row
        })
        .collect();
    ResponseMatrix::new(persons, items, rows)
}

/// Column blocks of `matrix` holding the items that mention each group.
pub fn group_blocks(
    matrix: &ResponseMatrix,
    mentions: &MentionIndex,
    groups: &[String],
) -> Vec<(String, Vec<usize>)> {
    groups
        .iter()
        .map(|g| {
            let cols = matrix
                .item_ids()
                .iter()
                .enumerate()
                .filter(|(_, id)| mentions.get(*id).is_some_and(|gs| gs.contains(g)))
                .map(|(j, _)| j)
                .collect();
            (g.clone(), cols)
        })
        .collect()
}

/// One participant's responses to the items mentioning one group, joined
/// with that participant's ratings of the group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study1Row {
    pub participant_id: String,
    pub group_id: String,
    pub n_items: u64,
    pub hate_count: u64,
    pub disagreement: Option<f64>,
    pub n_comparisons: u64,
    /// Rasch tendency within the group's item block.
    pub tendency: Option<f64>,
    pub tendency_extremal: bool,
    pub warmth: f64,
    pub competence: f64,
}

/// Build the participant × group table. Rows exist for every rated pair
/// whose participant labelled at least one item mentioning the group.
pub fn study1_table(
    annotations: &AnnotationSet,
    mentions: &MentionIndex,
    groups: &[String],
    composites: &[ExplicitComposite],
    exec: Execution,
) -> Result<Vec<Study1Row>> {
    let matrix = response_matrix(annotations)?;
    let blocks = group_blocks(&matrix, mentions, groups);
    let fits = fit_rasch_blocks(&matrix, &blocks, &RaschOptions::default(), exec);
    let mut tendency: HashMap<(&str, &str), (f64, bool)> = HashMap::new();
    for b in &fits {
        if let Some(e) = &b.error {
            log::warn!("tendencies for group {} unavailable: {e}", b.block);
        }
        for t in &b.tendencies {
            tendency.insert(
                (t.person_id.as_str(), b.block.as_str()),
                (t.theta, t.extremal),
            );
        }
    }
    let disagreement: HashMap<(String, String), (f64, u64)> =
        group_disagreements(annotations, mentions, groups)
            .into_iter()
            .map(|d| ((d.participant_id, d.group_id), (d.d, d.n_comparisons)))
            .collect();
    let group_set: HashSet<&str> = groups.iter().map(String::as_str).collect();

    let mut rows = Vec::new();
    for c in composites
        .iter()
        .filter(|c| group_set.contains(c.group_id.as_str()))
    {
        let (mut n_items, mut hate) = (0u64, 0u64);
        for (item, label) in annotations.annotator_labels(&c.participant_id) {
            if mentions
                .get(item)
                .is_some_and(|gs| gs.contains(&c.group_id))
            {
                n_items += 1;
                hate += u64::from(label);
            }
        }
        if n_items == 0 {
            continue;
        }
        let key = (c.participant_id.clone(), c.group_id.clone());
        let (d, comparisons) = disagreement
            .get(&key)
            .map_or((None, 0), |(d, n)| (Some(*d), *n));
        let t = tendency.get(&(c.participant_id.as_str(), c.group_id.as_str()));
        rows.push(Study1Row {
            participant_id: c.participant_id.clone(),
            group_id: c.group_id.clone(),
            n_items,
            hate_count: hate,
            disagreement: d,
            n_comparisons: comparisons,
            tendency: t.map(|t| t.0),
            tendency_extremal: t.is_some_and(|t| t.1),
            warmth: c.warmth,
            competence: c.competence,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectsSpec {
    pub participant_effects: bool,
    pub group_effects: bool,
}

impl Default for EffectsSpec {
    fn default() -> Self {
        Self {
            participant_effects: true,
            group_effects: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study1Fit {
    pub outcome: String,
    pub effects: EffectsSpec,
    pub n_rows: usize,
    /// Participants left out because their outcome never varies from the
    /// boundary, which sends their fixed effect to infinity.
    pub dropped_participants: Vec<String>,
    pub dropped_groups: Vec<String>,
    pub fit: GlmFit,
}

fn design<'a>(
    rows: &[&'a Study1Row],
    effects: EffectsSpec,
    offset: Option<Vec<f64>>,
) -> Result<DesignMatrix> {
    let mut x = DesignMatrix::with_intercept(rows.len());
    x.push_column("warmth", rows.iter().map(|r| r.warmth).collect())?;
    x.push_column("competence", rows.iter().map(|r| r.competence).collect())?;
    let distinct =
        |f: fn(&'a Study1Row) -> &'a str| rows.iter().map(|r| f(r)).collect::<HashSet<_>>().len();
    if effects.participant_effects && distinct(|r| r.participant_id.as_str()) > 1 {
        let ids: Vec<&str> = rows.iter().map(|r| r.participant_id.as_str()).collect();
        x.push_cluster("participant", &ids)?;
    }
    if effects.group_effects && distinct(|r| r.group_id.as_str()) > 1 {
        let ids: Vec<&str> = rows.iter().map(|r| r.group_id.as_str()).collect();
        x.push_cluster("group", &ids)?;
    }
    if let Some(o) = offset {
        x.set_offset(o)?;
    }
    Ok(x)
}

/// Ids whose rows all satisfy `at_boundary`.
fn boundary_ids<F, K>(rows: &[Study1Row], key: K, at_boundary: F) -> Vec<String>
where
    F: Fn(&Study1Row) -> bool,
    K: Fn(&Study1Row) -> &str,
{
    let mut all: indexmap::IndexMap<&str, bool> = indexmap::IndexMap::new();
    for r in rows {
        let e = all.entry(key(r)).or_insert(true);
        *e &= at_boundary(r);
    }
    all.into_iter()
        .filter(|(_, b)| *b)
        .map(|(k, _)| k.to_owned())
        .collect()
}

/// Poisson regression of hate-label counts on warmth and competence with
/// fixed effects and `log(n_items)` as offset.
pub fn fit_hate_counts(rows: &[Study1Row], effects: EffectsSpec) -> Result<Study1Fit> {
    let zero = |r: &Study1Row| r.hate_count == 0;
    let dropped_participants = if effects.participant_effects {
        boundary_ids(rows, |r| &r.participant_id, zero)
    } else {
        Vec::new()
    };
    let dropped_groups = if effects.group_effects {
        boundary_ids(rows, |r| &r.group_id, zero)
    } else {
        Vec::new()
    };
    let dp: HashSet<&str> = dropped_participants.iter().map(String::as_str).collect();
    let dg: HashSet<&str> = dropped_groups.iter().map(String::as_str).collect();
    let kept: Vec<&Study1Row> = rows
        .iter()
        .filter(|r| !dp.contains(r.participant_id.as_str()) && !dg.contains(r.group_id.as_str()))
        .collect();
    if kept.is_empty() {
        return Err(Error::invalid("no rows left for the hate-count model"));
    }
    let offset = kept.iter().map(|r| (r.n_items as f64).ln()).collect();
    let x = design(&kept, effects, Some(offset))?;
    let y: Vec<f64> = kept.iter().map(|r| r.hate_count as f64).collect();
    let fit = fit_glm(&x, &y, Family::Poisson, &GlmOptions::default())?;
    Ok(Study1Fit {
        outcome: "hate_count".into(),
        effects,
        n_rows: kept.len(),
        dropped_participants,
        dropped_groups,
        fit,
    })
}

/// Binomial regression of group-level disagreement on warmth and competence,
/// weighted by the number of co-annotator comparisons.
pub fn fit_disagreement(rows: &[Study1Row], effects: EffectsSpec) -> Result<Study1Fit> {
    let usable: Vec<Study1Row> = rows
        .iter()
        .filter(|r| r.disagreement.is_some() && r.n_comparisons > 0)
        .cloned()
        .collect();
    let extreme = |r: &Study1Row| matches!(r.disagreement, Some(d) if d == 0.0 || d == 1.0);
    let dropped_participants = if effects.participant_effects {
        boundary_ids(&usable, |r| &r.participant_id, extreme)
    } else {
        Vec::new()
    };
    let dp: HashSet<&str> = dropped_participants.iter().map(String::as_str).collect();
    let kept: Vec<&Study1Row> = usable
        .iter()
        .filter(|r| !dp.contains(r.participant_id.as_str()))
        .collect();
    if kept.is_empty() {
        return Err(Error::invalid("no rows left for the disagreement model"));
    }
    let x = design(&kept, effects, None)?;
    let y: Vec<f64> = kept.iter().map(|r| r.disagreement.unwrap_or(0.0)).collect();
    let opts = GlmOptions {
        weights: Some(kept.iter().map(|r| r.n_comparisons as f64).collect()),
        ..GlmOptions::default()
    };
    let fit = fit_glm(&x, &y, Family::Binomial, &opts)?;
    Ok(Study1Fit {
        outcome: "disagreement".into(),
        effects,
        n_rows: kept.len(),
        dropped_participants,
        dropped_groups: Vec::new(),
        fit,
    })
}

/// Item disagreement on majority-hate against majority-non-hate items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisagreementContrast {
    pub n_hate: usize,
    pub n_non_hate: usize,
    pub n_ties_excluded: usize,
    pub n_single_annotator: usize,
    pub mean_hate: f64,
    pub mean_non_hate: f64,
    pub test: PermutationResult,
}

/// Compare mean item disagreement between items whose majority label is
/// hate and the rest, with a two-sided permutation test. Tied items and
/// items with a single annotation are left out.
pub fn disagreement_contrast(
    annotations: &AnnotationSet,
    n_perm: u64,
    seed: u64,
    exec: Execution,
) -> Result<DisagreementContrast> {
    let (mut hate, mut non) = (Vec::new(), Vec::new());
    let (mut ties, mut single) = (0, 0);
    for (_, c) in annotations.item_counts() {
        if c.total() < 2 {
            single += 1;
            continue;
        }
        if c.n1 == c.n0 {
            ties += 1;
            continue;
        }
        let d = item_disagreement(c.n1, c.n0)?;
        if c.n1 > c.n0 {
            hate.push(d);
        } else {
            non.push(d);
        }
    }
    let test = permutation_test(&hate, &non, Statistic::MeanDiff, n_perm, seed, exec)?;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(DisagreementContrast {
        n_hate: hate.len(),
        n_non_hate: non.len(),
        n_ties_excluded: ties,
        n_single_annotator: single,
        mean_hate: mean(&hate),
        mean_non_hate: mean(&non),
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::mention_index;
    use crate::simulate::{simulate_annotations, SimConfig};
    use crate::stereotype::{explicit_composites, CompositeOptions};

    fn table(cfg: &SimConfig, seed: u64) -> Vec<Study1Row> {
        let d = simulate_annotations(cfg, seed).unwrap();
        let (idx, _) = mention_index(&d.posts, &d.lexicon);
        let groups: Vec<String> = d.lexicon.groups().map(str::to_owned).collect();
        let (comp, _) = explicit_composites(&d.survey, CompositeOptions::default());
        study1_table(&d.annotations, &idx, &groups, &comp, Execution::Parallel).unwrap()
    }

    #[test]
    fn table_rows_are_consistent() {
        let cfg = SimConfig {
            n_participants: 60,
            n_groups: 3,
            items_per_group: 5,
            ..SimConfig::default()
        };
        let rows = table(&cfg, 2);
        assert_eq!(rows.len(), 180);
        for r in &rows {
            assert_eq!(r.n_items, 5);
            assert!(r.hate_count <= 5);
            assert_eq!(r.n_comparisons, 5 * 59);
            let d = r.disagreement.unwrap();
            assert!((0.0..=1.0).contains(&d));
            assert!(r.tendency.is_some());
            assert_eq!(r.tendency_extremal, r.hate_count == 0 || r.hate_count == 5);
        }
    }

    #[test]
    fn planted_competence_effect_is_recovered() {
        let rows = table(&SimConfig::default(), 1);
        let f = fit_hate_counts(&rows, EffectsSpec::default()).unwrap();
        assert!(f.fit.converged);
        assert!(f.fit.coef("competence").unwrap() > 0.0);
        assert!(f.fit.p_value("competence").unwrap() < 0.05);
        let d = fit_disagreement(&rows, EffectsSpec::default()).unwrap();
        assert!(d.fit.coef("competence").unwrap().is_finite());
    }

    #[test]
    fn contrast_on_small_corpus() {
        let cfg = SimConfig {
            n_participants: 5,
            n_groups: 4,
            items_per_group: 10,
            ..SimConfig::default()
        };
        let d = simulate_annotations(&cfg, 8).unwrap();
        let c = disagreement_contrast(&d.annotations, 500, 1, Execution::Parallel).unwrap();
        assert_eq!(
            c.n_hate + c.n_non_hate + c.n_ties_excluded + c.n_single_annotator,
            40
        );
        assert!((0.0..=1.0).contains(&c.test.p_value));
    }
}
