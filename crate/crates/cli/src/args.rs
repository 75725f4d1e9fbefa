use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Annotator stereotypes, disagreement and classifier bias audits.
#[derive(Debug, Parser)]
#[command(name = "annobias", version, args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output directory, created when missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads for parallel loops (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// `key = value` file whose entries override command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Validate annotations, posts and lexicon; write majority labels and mentions.
    Ingest(IngestArgs),
    /// Item, participant and group-level disagreement plus agreement statistics.
    Disagree(DisagreeArgs),
    /// Conditional maximum-likelihood Rasch fit of a wide 0/1 response table.
    Rasch(RaschArgs),
    /// Embedding-based warmth and competence scores, and explicit survey composites.
    Stereotype(StereotypeArgs),
    /// Fit a GLM to a table, or build and fit the participant-by-group models.
    Associate(AssociateArgs),
    /// Train/test bias audit with per-group error tallies and Poisson associations.
    Audit(AuditArgs),
    /// Write a synthetic dataset with planted effects.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Disagree(_) => "disagree",
            Command::Rasch(_) => "rasch",
            Command::Stereotype(_) => "stereotype",
            Command::Associate(_) => "associate",
            Command::Audit(_) => "audit",
            Command::Simulate(_) => "simulate",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IngestArgs {
    /// `item_id,annotator_id,label` CSV.
    #[arg(long)]
    pub annotations: PathBuf,
    /// JSONL posts with `id` and `text`.
    #[arg(long)]
    pub posts: Option<PathBuf>,
    /// `group_id<TAB>surface_form` lexicon.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DisagreeArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    /// Posts and lexicon together enable group-level disagreement.
    #[arg(long, requires = "lexicon")]
    pub posts: Option<PathBuf>,
    #[arg(long, requires = "posts")]
    pub lexicon: Option<PathBuf>,
    /// Permutations for the majority-hate against non-hate contrast.
    #[arg(long, default_value_t = 5000)]
    pub permutations: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RaschArgs {
    /// Wide CSV: `person_id` then one 0/1 column per item; blank or NA is missing.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StereotypeArgs {
    /// Whitespace-separated embedding text file.
    #[arg(long, requires_all = ["lexicon", "warmth_dict", "competence_dict"])]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Warmth dictionary, one word per line.
    #[arg(long)]
    pub warmth_dict: Option<PathBuf>,
    /// Competence dictionary, one word per line.
    #[arg(long)]
    pub competence_dict: Option<PathBuf>,
    /// Survey CSV: participant_id, group_id, friendliness, helpfulness, violence, intelligence.
    #[arg(long)]
    pub survey: Option<PathBuf>,
    /// Score violence as `9 − violence` inside the warmth composite.
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub reverse_code_violence: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Poisson,
    Binomial,
    Gaussian,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AssociateArgs {
    /// Input table (CSV with header). Alternative to the annotation inputs.
    #[arg(long, conflicts_with = "annotations")]
    pub data: Option<PathBuf>,
    /// Build the participant-by-group table from these inputs.
    #[arg(long, requires_all = ["posts", "lexicon", "survey"])]
    pub annotations: Option<PathBuf>,
    #[arg(long)]
    pub posts: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub survey: Option<PathBuf>,
    /// Model formula `response ~ col + col`; `1` alone fits the intercept.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Poisson)]
    pub family: FamilyArg,
    /// Offset column, or `log(column)`.
    #[arg(long)]
    pub offset: Option<String>,
    /// Prior-weight column (trials for the binomial family).
    #[arg(long)]
    pub weights: Option<String>,
    /// Categorical columns expanded into fixed-effect indicators.
    #[arg(long, value_delimiter = ',')]
    pub cluster: Vec<String>,
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub reverse_code_violence: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorArg {
    /// False positives over negatives, false negatives over positives.
    Class,
    /// Both over all instances mentioning the group.
    Total,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AuditArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub posts: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Needed by the internal baseline and for computing scores.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub warmth_dict: Option<PathBuf>,
    #[arg(long)]
    pub competence_dict: Option<PathBuf>,
    /// Precomputed `stereotype_scores.csv`, instead of the dictionaries.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// External predictions `iteration,item_id,predicted,majority`; skips the baseline.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    #[arg(long, default_value_t = 0.8)]
    pub train_frac: f64,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    /// Keep tied items as negatives instead of dropping them.
    #[arg(long, default_value_t = false, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub include_ties: bool,
    #[arg(long, value_enum, default_value_t = DenominatorArg::Class)]
    pub denominator: DenominatorArg,
    /// L2 penalty of the baseline classifier.
    #[arg(long, default_value_t = 1.0)]
    pub ridge: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Participants labelling and rating every group.
    Study1,
    /// Corpus, embeddings and dictionaries with a planted false-positive effect.
    Audit,
    /// A complete Rasch response table.
    Rasch,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Scenario::Study1)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 500)]
    pub participants: usize,
    /// Number of groups (default 8 for study1, 12 for audit).
    #[arg(long)]
    pub groups: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub items_per_group: usize,
    #[arg(long)]
    pub annotators_per_item: Option<usize>,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub b_competence: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b_warmth: f64,
    /// Corpus size of the audit scenario.
    #[arg(long, default_value_t = 2000)]
    pub items: usize,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    pub fp_slope: f64,
    /// Persons and items of the Rasch scenario.
    #[arg(long, default_value_t = 500)]
    pub persons: usize,
    #[arg(long, default_value_t = 30)]
    pub rasch_items: usize,
}
