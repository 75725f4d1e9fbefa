use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::logistic;
use crate::corpus::{AnnotationSet, Post, PostTable, SgtLexicon};
use crate::stereotype::{dictionary_score, score_groups, Dictionary, EmbeddingTable, GroupScoring};
use crate::{Error, Execution, Result};

/// A labelled corpus with embeddings in which non-hateful posts about
/// low-competence groups are more often dressed in hateful-looking tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditScenarioConfig {
    pub n_items: usize,
    pub n_groups: usize,
    pub dim: usize,
    pub n_annotators: usize,
    pub annotators_per_item: usize,
    /// Probability that one annotator reports the intended label.
    pub annotator_accuracy: f64,
    pub hate_rate: f64,
    pub tokens_per_post: usize,
    pub cues_per_post: usize,
    /// Log-odds that a non-hateful post carries hateful cues, at the mean
    /// competence score.
    pub fp_intercept: f64,
    /// Change in those log-odds per unit of competence score.
    pub fp_slope: f64,
}

impl Default for AuditScenarioConfig {
    fn default() -> Self {
        Self {
            n_items: 2000,
            n_groups: 12,
            dim: 16,
            n_annotators: 20,
            annotators_per_item: 3,
            annotator_accuracy: 0.9,
            hate_rate: 0.3,
            tokens_per_post: 8,
            cues_per_post: 3,
            fp_intercept: -2.2,
            fp_slope: -4.0,
        }
    }
}

impl AuditScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::invalid(format!("audit scenario config: {m}")));
        if self.n_items < 10 || self.n_groups < 3 || self.dim < 4 {
            return fail("need at least 10 items, 3 groups and dimension 4");
        }
        if self.annotators_per_item < 1 || self.annotators_per_item > self.n_annotators {
            return fail("annotators per item must lie in 1..=n_annotators");
        }
        if self.cues_per_post >= self.tokens_per_post {
            return fail("cues per post must leave room for the group token");
        }
        let probs = [self.annotator_accuracy, self.hate_rate];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return fail("probabilities must lie in [0, 1]");
        }
        if !self.fp_intercept.is_finite() || !self.fp_slope.is_finite() {
            return fail("effect sizes must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditTruth {
    pub seed: u64,
    pub config: AuditScenarioConfig,
    pub group_ids: Vec<String>,
    pub competence_scores: Vec<f64>,
    /// Per-group probability that a non-hateful post carries hateful cues.
    pub cue_probability: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AuditScenario {
    pub annotations: AnnotationSet,
    pub posts: PostTable,
    pub lexicon: SgtLexicon,
    pub embeddings: EmbeddingTable,
    pub warmth_dictionary: Dictionary,
    pub competence_dictionary: Dictionary,
    pub scores: GroupScoring,
    pub truth: AuditTruth,
}

const COMPETENCE: usize = 0;
const WARMTH: usize = 1;
const HATE: usize = 2;

fn vector<R: Rng>(
    rng: &mut R,
    dim: usize,
    axis: Option<(usize, f64)>,
    noise: f64,
    axis_noise: f64,
) -> Vec<f32> {
    let n = Normal::new(0.0, noise).expect("positive sd");
    let a = Normal::new(0.0, axis_noise).expect("positive sd");
    let mut v: Vec<f64> = (0..dim)
        .map(|j| {
            if j <= HATE {
                a.sample(rng)
            } else {
                n.sample(rng)
            }
        })
        .collect();
    if let Some((j, x)) = axis {
        v[j] += x;
    }
    v.into_iter().map(|x| x as f32).collect()
}

/// Generate the corpus, embeddings, dictionaries and implicit group scores.
/// Each non-hateful post about group `g` carries hateful cue tokens with
/// probability `logistic(fp_intercept + fp_slope·(s_g − s̄))`, where `s_g` is
/// the group's competence score.
pub fn simulate_audit_scenario(config: &AuditScenarioConfig, seed: u64) -> Result<AuditScenario> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = config.dim;
    let group_ids: Vec<String> = (0..config.n_groups)
        .map(|g| format!("g{:02}", g + 1))
        .collect();
    let forms: Vec<String> = (0..config.n_groups)
        .map(|g| format!("grp{:02}", g + 1))
        .collect();

    let mut entries = Vec::new();
    let comp_words: Vec<String> = (0..12).map(|k| format!("compw{k}")).collect();
    let warm_words: Vec<String> = (0..12).map(|k| format!("warmw{k}")).collect();
    for w in &comp_words {
        entries.push((
            w.clone(),
            vector(&mut rng, dim, Some((COMPETENCE, 1.0)), 0.3, 0.1),
        ));
    }
    for w in &warm_words {
        entries.push((
            w.clone(),
            vector(&mut rng, dim, Some((WARMTH, 1.0)), 0.3, 0.1),
        ));
    }
    let jitter = Normal::new(0.0, 0.1).expect("positive sd");
    let warm_spread = Normal::new(0.0, 0.7).expect("positive sd");
    for (g, form) in forms.iter().enumerate() {
        let alpha = -1.0 + 2.0 * g as f64 / (config.n_groups - 1) as f64 + jitter.sample(&mut rng);
        let mut v = vector(&mut rng, dim, None, 0.4, 0.0001);
        v[COMPETENCE] = alpha as f32;
        v[WARMTH] = warm_spread.sample(&mut rng) as f32;
        entries.push((form.clone(), v));
    }
    let fillers: Vec<String> = (0..200).map(|k| format!("tok{k}")).collect();
    for w in &fillers {
        entries.push((w.clone(), vector(&mut rng, dim, None, 1.0, 0.1)));
    }
    let cues: Vec<String> = (0..10).map(|k| format!("cue{k}")).collect();
    for w in &cues {
        entries.push((
            w.clone(),
            vector(&mut rng, dim, Some((HATE, 2.0)), 0.2, 0.2),
        ));
    }
    let embeddings = EmbeddingTable::from_entries(entries)?;
    let warmth_dictionary = Dictionary::new("warmth", &warm_words)?;
    let competence_dictionary = Dictionary::new("competence", &comp_words)?;

    let comp_scores: Vec<f64> = forms
        .iter()
        .map(|f| dictionary_score(f, &competence_dictionary, &embeddings).map(|s| s.score))
        .collect::<Result<_>>()?;
    let mean = comp_scores.iter().sum::<f64>() / comp_scores.len() as f64;
    let cue_probability: Vec<f64> = comp_scores
        .iter()
        .map(|s| logistic(config.fp_intercept + config.fp_slope * (s - mean)))
        .collect();

    let annotators: Vec<String> = (0..config.n_annotators)
        .map(|a| format!("a{:03}", a + 1))
        .collect();
    let mut annotations = AnnotationSet::new();
    let mut posts = PostTable::new();
    for i in 0..config.n_items {
        let g = i % config.n_groups;
        let hateful = rng.random::<f64>() < config.hate_rate;
        let cued = hateful || rng.random::<f64>() < cue_probability[g];
        let mut tokens = vec![forms[g].clone()];
        if cued {
            tokens.extend(
                (0..config.cues_per_post).map(|_| cues[rng.random_range(0..cues.len())].clone()),
            );
        }
        while tokens.len() < config.tokens_per_post {
            tokens.push(fillers[rng.random_range(0..fillers.len())].clone());
        }
        tokens.shuffle(&mut rng);
        let id = format!("item{:05}", i + 1);
        posts.insert(Post {
            id: id.clone(),
            text: tokens.join(" "),
        })?;
        for a in sample(&mut rng, config.n_annotators, config.annotators_per_item) {
            let truthful = rng.random::<f64>() < config.annotator_accuracy;
            let label = u8::from(hateful == truthful);
            annotations.insert(&id, &annotators[a], label)?;
        }
    }
    let lexicon = SgtLexicon::from_pairs(group_ids.iter().cloned().zip(forms.iter().cloned()))?;
    let scores = score_groups(
        &lexicon,
        &warmth_dictionary,
        &competence_dictionary,
        &embeddings,
        Execution::Sequential,
    );
    Ok(AuditScenario {
        annotations,
        posts,
        lexicon,
        embeddings,
        warmth_dictionary,
        competence_dictionary,
        scores,
        truth: AuditTruth {
            seed,
            config: config.clone(),
            group_ids,
            competence_scores: comp_scores,
            cue_probability,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_shape_and_determinism() {
        let cfg = AuditScenarioConfig {
            n_items: 300,
            ..Default::default()
        };
        let a = simulate_audit_scenario(&cfg, 5).unwrap();
        assert_eq!(a.posts.len(), 300);
        assert_eq!(a.annotations.len(), 900);
        assert_eq!(a.scores.scores.len(), 12);
        assert!(a.scores.failures.is_empty());
        assert!(a.annotations.majority_labels().iter().all(|m| !m.tied));
        let b = simulate_audit_scenario(&cfg, 5).unwrap();
        assert_eq!(a.posts.to_jsonl(), b.posts.to_jsonl());
        assert_eq!(a.embeddings.to_text(), b.embeddings.to_text());
        assert_eq!(a.truth, b.truth);
    }

    #[test]
    fn competence_scores_spread_and_drive_cues() {
        let a = simulate_audit_scenario(&AuditScenarioConfig::default(), 1).unwrap();
        let s = &a.truth.competence_scores;
        let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo > 0.5, "{s:?}");
        let order = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
            idx
        };
        let mut rev = order(&a.truth.cue_probability);
        rev.reverse();
        assert_eq!(order(s), rev);
    }
}
