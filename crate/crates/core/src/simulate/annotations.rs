use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{logistic, rating};
use crate::corpus::{AnnotationSet, Post, PostTable, SgtLexicon};
use crate::stereotype::{explicit_composites, CompositeOptions, SurveyRow};
use crate::{Error, Result};

/// Scale midpoint; ratings enter the label model as deviations from it.
const MIDPOINT: f64 = 4.5;

/// Survey design: every item mentions one group, participants label
/// whole group blocks and rate every group they label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_participants: usize,
    pub n_groups: usize,
    pub items_per_group: usize,
    /// Participants labelling each group block; `None` means all of them.
    pub annotators_per_item: Option<usize>,
    pub competence_mean: f64,
    pub warmth_mean: f64,
    /// Spread of group means around the overall mean.
    pub group_sd: f64,
    /// Spread of participant-specific rating shifts.
    pub participant_sd: f64,
    /// Spread of a single rating around its (participant, group) mean.
    pub rating_sd: f64,
    pub theta_sd: f64,
    pub delta_sd: f64,
    /// Log-odds shift per competence point above the scale midpoint.
    pub b_competence: f64,
    /// Log-odds shift per warmth point above the scale midpoint.
    pub b_warmth: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_participants: 500,
            n_groups: 8,
            items_per_group: 7,
            annotators_per_item: None,
            competence_mean: 4.5,
            warmth_mean: 4.5,
            group_sd: 1.0,
            participant_sd: 0.75,
            rating_sd: 1.25,
            theta_sd: 1.0,
            delta_sd: 1.0,
            b_competence: 0.3,
            b_warmth: 0.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::invalid(format!("simulation config: {m}")));
        if self.n_participants < 2 || self.n_groups < 2 || self.items_per_group < 2 {
            return fail("participants, groups and items per group must each be at least 2");
        }
        if let Some(k) = self.annotators_per_item {
            if k < 2 || k > self.n_participants {
                return fail("annotators per item must lie in 2..=n_participants");
            }
        }
        let values = [
            self.competence_mean,
            self.warmth_mean,
            self.group_sd,
            self.participant_sd,
            self.rating_sd,
            self.theta_sd,
            self.delta_sd,
            self.b_competence,
            self.b_warmth,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return fail("parameters must be finite");
        }
        let sds = [
            self.group_sd,
            self.participant_sd,
            self.rating_sd,
            self.theta_sd,
            self.delta_sd,
        ];
        if sds.iter().any(|v| *v < 0.0) {
            return fail("standard deviations must be non-negative");
        }
        if !(1.0..=8.0).contains(&self.competence_mean) || !(1.0..=8.0).contains(&self.warmth_mean)
        {
            return fail("rating means must lie on the 1–8 scale");
        }
        Ok(())
    }

    pub fn group_ids(&self) -> Vec<String> {
        (0..self.n_groups)
            .map(|g| format!("g{:02}", g + 1))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthValue {
    pub id: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRating {
    pub participant_id: String,
    pub group_id: String,
    /// Explicit warmth composite of the survey row.
    pub warmth: f64,
    pub competence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTruth {
    pub seed: u64,
    pub config: SimConfig,
    pub theta: Vec<TruthValue>,
    pub delta: Vec<TruthValue>,
    pub ratings: Vec<TruthRating>,
    pub b_competence: f64,
    pub b_warmth: f64,
}

#[derive(Debug, Clone)]
pub struct SimData {
    pub annotations: AnnotationSet,
    pub posts: PostTable,
    pub lexicon: SgtLexicon,
    pub survey: Vec<SurveyRow>,
    pub truth: SimTruth,
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("validated sd")
}

/// Draw a labelled corpus from `P(label = 1) = logistic(θ_p + b_c·(C − 4.5)
/// + b_w·(W − 4.5) − δ_i)`, where `C` and `W` are participant `p`'s competence
/// and warmth ratings of the group item `i` mentions.
pub fn simulate_annotations(config: &SimConfig, seed: u64) -> Result<SimData> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let np = config.n_participants;
    let groups = config.group_ids();
    let participants: Vec<String> = (0..np).map(|p| format!("p{:04}", p + 1)).collect();

    let theta: Vec<f64> = (0..np)
        .map(|_| normal(config.theta_sd).sample(&mut rng))
        .collect();
    let item_ids: Vec<Vec<String>> = groups
        .iter()
        .map(|g| {
            (0..config.items_per_group)
                .map(|k| format!("{g}_i{:02}", k + 1))
                .collect()
        })
        .collect();
    let delta: Vec<Vec<f64>> = item_ids
        .iter()
        .map(|items| {
            items
                .iter()
                .map(|_| normal(config.delta_sd).sample(&mut rng))
                .collect()
        })
        .collect();
    let comp_group: Vec<f64> = groups
        .iter()
        .map(|_| config.competence_mean + normal(config.group_sd).sample(&mut rng))
        .collect();
    let warm_group: Vec<f64> = groups
        .iter()
        .map(|_| config.warmth_mean + normal(config.group_sd).sample(&mut rng))
        .collect();
    let shift: Vec<(f64, f64)> = (0..np)
        .map(|_| {
            let d = normal(config.participant_sd);
            (d.sample(&mut rng), d.sample(&mut rng))
        })
        .collect();
    let members: Vec<Vec<usize>> = groups
        .iter()
        .map(|_| match config.annotators_per_item {
            None => (0..np).collect(),
            Some(k) => {
                let mut m = sample(&mut rng, np, k).into_vec();
                m.sort_unstable();
                m
            }
        })
        .collect();

    // the three warmth items share one latent value, so they agree closely
    let item_sd = 0.5 * config.rating_sd;
    let mut survey = Vec::new();
    for (g, gid) in groups.iter().enumerate() {
        for &p in &members[g] {
            let w = warm_group[g] + shift[p].1;
            let c = comp_group[g] + shift[p].0;
            survey.push(SurveyRow {
                participant_id: participants[p].clone(),
                group_id: gid.clone(),
                friendliness: rating(&mut rng, w, item_sd),
                helpfulness: rating(&mut rng, w, item_sd),
                violence: rating(&mut rng, 9.0 - w, item_sd),
                intelligence: rating(&mut rng, c, config.rating_sd),
            });
        }
    }
    let (composites, rejected) = explicit_composites(&survey, CompositeOptions::default());
    debug_assert!(rejected.is_empty());

    let mut annotations = AnnotationSet::new();
    let mut posts = PostTable::new();
    let mut ratings = Vec::with_capacity(composites.len());
    let mut row = 0;
    for (g, gid) in groups.iter().enumerate() {
        let block = &composites[row..row + members[g].len()];
        row += members[g].len();
        for (k, item) in item_ids[g].iter().enumerate() {
            posts.insert(Post {
                id: item.clone(),
                text: format!("synthetic post {} about {}", k + 1, surface_form(gid)),
            })?;
            for (&p, c) in members[g].iter().zip(block) {
                let eta = theta[p]
                    + config.b_competence * (c.competence - MIDPOINT)
                    + config.b_warmth * (c.warmth - MIDPOINT)
                    - delta[g][k];
                let label = u8::from(rng.random::<f64>() < logistic(eta));
                annotations.insert(item, &participants[p], label)?;
            }
        }
        ratings.extend(block.iter().map(|c| TruthRating {
            participant_id: c.participant_id.clone(),
            group_id: c.group_id.clone(),
            warmth: c.warmth,
            competence: c.competence,
        }));
    }
    let lexicon = SgtLexicon::from_pairs(groups.iter().map(|g| (g.clone(), surface_form(g))))?;

    let truth = SimTruth {
        seed,
        config: config.clone(),
        theta: participants
            .iter()
            .zip(&theta)
            .map(|(id, v)| TruthValue {
                id: id.clone(),
                value: *v,
            })
            .collect(),
        delta: item_ids
            .iter()
            .flatten()
            .zip(delta.iter().flatten())
            .map(|(id, v)| TruthValue {
                id: id.clone(),
                value: *v,
            })
            .collect(),
        ratings,
        b_competence: config.b_competence,
        b_warmth: config.b_warmth,
    };
    Ok(SimData {
        annotations,
        posts,
        lexicon,
        survey,
        truth,
    })
}

/// Pseudo-word naming a synthetic group in post text.
fn surface_form(group_id: &str) -> String {
    format!("grp{}", &group_id[1..])
}

impl SimTruth {
    /// Generative probability that `participant_id` labels `item_id` hateful.
    pub fn probability(&self, participant_id: &str, item_id: &str) -> Option<f64> {
        let theta = self.theta.iter().find(|t| t.id == participant_id)?.value;
        let delta = self.delta.iter().find(|d| d.id == item_id)?.value;
        let group = item_id.split('_').next()?;
        let r = self
            .ratings
            .iter()
            .find(|r| r.participant_id == participant_id && r.group_id == group)?;
        Some(logistic(
            theta
                + self.b_competence * (r.competence - MIDPOINT)
                + self.b_warmth * (r.warmth - MIDPOINT)
                - delta,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig {
            n_participants: 40,
            n_groups: 3,
            items_per_group: 4,
            ..SimConfig::default()
        }
    }

    #[test]
    fn shapes_and_determinism() {
        let a = simulate_annotations(&small(), 9).unwrap();
        assert_eq!(a.annotations.len(), 40 * 3 * 4);
        assert_eq!(a.posts.len(), 12);
        assert_eq!(a.survey.len(), 40 * 3);
        assert_eq!(a.truth.delta.len(), 12);
        assert!(a.survey.iter().all(|r| {
            [r.friendliness, r.helpfulness, r.violence, r.intelligence]
                .iter()
                .all(|v| (1.0..=8.0).contains(v))
        }));
        let b = simulate_annotations(&small(), 9).unwrap();
        assert_eq!(a.annotations.records(), b.annotations.records());
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.posts.to_jsonl(), b.posts.to_jsonl());
        let c = simulate_annotations(&small(), 10).unwrap();
        assert_ne!(a.annotations.records(), c.annotations.records());
    }

    #[test]
    fn every_item_in_one_group_block() {
        let cfg = SimConfig {
            annotators_per_item: Some(10),
            ..small()
        };
        let d = simulate_annotations(&cfg, 1).unwrap();
        let (index, _) = crate::corpus::mention_index(&d.posts, &d.lexicon);
        for (item, groups) in &index {
            assert_eq!(groups.len(), 1);
            assert!(item.starts_with(&groups[0]));
            assert_eq!(d.annotations.counts(item).unwrap().total(), 10);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(simulate_annotations(
            &SimConfig {
                n_groups: 1,
                ..small()
            },
            0
        )
        .is_err());
        assert!(simulate_annotations(
            &SimConfig {
                annotators_per_item: Some(41),
                ..small()
            },
            0
        )
        .is_err());
        assert!(simulate_annotations(
            &SimConfig {
                b_competence: f64::NAN,
                ..small()
            },
            0
        )
        .is_err());
    }

    #[test]
    fn label_rate_matches_generative_probability() {
        let cfg = SimConfig {
            n_participants: 2,
            n_groups: 2,
            items_per_group: 2,
            ..SimConfig::default()
        };
        let reps = 10_000;
        let (mut labels, mut probs) = (0.0, 0.0);
        let mut bins = [(0.0f64, 0.0f64, 0u32); 5];
        for seed in 0..reps {
            let d = simulate_annotations(&cfg, seed).unwrap();
            let l = f64::from(d.annotations.label_of("p0001", "g01_i01").unwrap());
            let p = d.truth.probability("p0001", "g01_i01").unwrap();
            labels += l;
            probs += p;
            let b = &mut bins[((p * 5.0) as usize).min(4)];
            b.0 += l;
            b.1 += p;
            b.2 += 1;
        }
        assert!((labels - probs).abs() / reps as f64 <= 0.02);
        for (l, p, n) in bins {
            if n >= 500 {
                assert!((l - p).abs() / f64::from(n) <= 0.03, "bin {l} {p} {n}");
            }
        }
    }

    #[test]
    fn hate_counts_rise_with_competence_rating() {
        let cfg = SimConfig {
            b_competence: 0.5,
            ..SimConfig::default()
        };
        let d = simulate_annotations(&cfg, 3).unwrap();
        let mut by_rating = [(0.0f64, 0u32); 9];
        for r in &d.truth.ratings {
            let count: u32 = d
                .annotations
                .annotator_labels(&r.participant_id)
                .filter(|(item, _)| item.starts_with(&r.group_id))
                .map(|(_, l)| u32::from(l))
                .sum();
            let b = &mut by_rating[r.competence as usize];
            b.0 += f64::from(count);
            b.1 += 1;
        }
        let means: Vec<f64> = by_rating
            .iter()
            .filter(|(_, n)| *n >= 100)
            .map(|(s, n)| s / f64::from(*n))
            .collect();
        assert!(means.len() >= 4);
        assert!(means.windows(2).all(|w| w[1] >= w[0]), "{means:?}");
    }
}
