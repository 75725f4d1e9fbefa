use serde::Serialize;

use annobias_core::audit::{
    associate_bias, load_predictions, predictions_to_csv, run_audit, stats_to_csv, tally_errors,
    AuditConfig, BaselineOptions, BiasAssociation, Denominator, ErrorKind, Predictor,
    SgtErrorStats,
};
use annobias_core::corpus::{load_annotations, load_lexicon, load_posts, mention_index};
use annobias_core::stereotype::{
    load_dictionary, load_embeddings, score_groups, EmbeddingTable, StereotypeScore,
};

use super::{plot_stub, Context};
use crate::args::{AuditArgs, DenominatorArg};
use crate::error::CliError;
use crate::output::Outputs;

#[derive(Serialize)]
struct Association {
    error_kind: ErrorKind,
    predictor: Predictor,
    result: Option<BiasAssociation>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Baseline {
    n_items: usize,
    n_ties_excluded: usize,
    n_items_without_text: usize,
    mean_accuracy: f64,
    accuracy: Vec<f64>,
    n_unconverged_fits: usize,
}

#[derive(Serialize)]
struct Report {
    predictions_source: &'static str,
    config: AuditConfig,
    baseline: Option<Baseline>,
    scores: Vec<StereotypeScore>,
    associations: Vec<Association>,
}

const PLOT: &str = "\
stats = pd.read_csv(f\"{d}/sgt_error_stats.csv\")
scores = pd.read_csv(f\"{d}/stereotype_scores.csv\")
m = stats.merge(scores, on=\"group_id\")
plt.scatter(m[\"competence\"], m[\"fp_ratio\"])
for _, r in m.iterrows():
    plt.annotate(r[\"group_id\"], (r[\"competence\"], r[\"fp_ratio\"]))
plt.xlabel(\"competence\")
plt.ylabel(\"false-positive ratio\")
";

fn load_scores(path: &std::path::Path) -> Result<Vec<StereotypeScore>, CliError> {
    #[derive(serde::Deserialize)]
    struct Row {
        group_id: String,
        warmth: f64,
        competence: f64,
        warmth_coverage: Option<f64>,
        competence_coverage: Option<f64>,
    }
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Validation(format!("{}:{line}: {e}", path.display()))
        })?;
        out.push(StereotypeScore {
            surface_form: row.group_id.clone(),
            group_id: row.group_id,
            warmth: row.warmth,
            competence: row.competence,
            warmth_coverage: row.warmth_coverage.unwrap_or(f64::NAN),
            competence_coverage: row.competence_coverage.unwrap_or(f64::NAN),
        });
    }
    Ok(out)
}

pub fn run(args: &AuditArgs, ctx: &Context) -> Result<Outputs, CliError> {
    if !(args.train_frac > 0.0 && args.train_frac < 1.0) {
        return Err(CliError::Validation(
            "--train-frac must lie strictly between 0 and 1".into(),
        ));
    }
    let ann = load_annotations(&args.annotations)?;
    let posts = load_posts(&args.posts)?;
    let lexicon = load_lexicon(&args.lexicon)?;
    let (mentions, _) = mention_index(&posts, &lexicon);
    let embeddings: Option<EmbeddingTable> =
        args.embeddings.as_ref().map(load_embeddings).transpose()?;

    let mut out = Outputs::new();
    let scores =
        match (
            &args.scores,
            &args.warmth_dict,
            &args.competence_dict,
            &embeddings,
        ) {
            (Some(path), _, _, _) => load_scores(path)?,
            (None, Some(w), Some(c), Some(table)) => {
                let warmth = load_dictionary(w, "warmth")?;
                let competence = load_dictionary(c, "competence")?;
                let scoring = score_groups(&lexicon, &warmth, &competence, table, ctx.exec);
                for f in &scoring.failures {
                    log::warn!("group {} not scored: {}", f.group_id, f.reason);
                }
                out.text("stereotype_scores.csv", scoring.to_csv());
                scoring.scores
            }
            _ => return Err(CliError::Validation(
                "audit needs --scores, or --embeddings with --warmth-dict and --competence-dict"
                    .into(),
            )),
        };

    let config = AuditConfig {
        train_fraction: args.train_frac,
        iterations: args.iterations,
        seed: ctx.seed,
        include_ties: args.include_ties,
        baseline: BaselineOptions { ridge: args.ridge },
        denominator: match args.denominator {
            DenominatorArg::Class => Denominator::ClassConditional,
            DenominatorArg::Total => Denominator::Total,
        },
    };
    let (stats, baseline, source): (Vec<SgtErrorStats>, _, _) = match &args.predictions {
        Some(path) => {
            let preds = load_predictions(path)?;
            (
                tally_errors(&preds, &mentions, config.denominator)?,
                None,
                "external",
            )
        }
        None => {
            let table = embeddings.as_ref().ok_or_else(|| {
                CliError::Validation("the internal baseline needs --embeddings".into())
            })?;
            let outcome = run_audit(&ann, &posts, &mentions, table, &config, ctx.exec)?;
            out.text("predictions.csv", predictions_to_csv(&outcome.predictions));
            let mean = outcome.accuracy.iter().sum::<f64>() / outcome.accuracy.len().max(1) as f64;
            let baseline = Baseline {
                n_items: outcome.n_items,
                n_ties_excluded: outcome.n_ties_excluded,
                n_items_without_text: outcome.n_items_without_text,
                mean_accuracy: mean,
                accuracy: outcome.accuracy,
                n_unconverged_fits: outcome.n_unconverged_fits,
            };
            (outcome.stats, Some(baseline), "baseline")
        }
    };
    out.text("sgt_error_stats.csv", stats_to_csv(&stats));

    let mut associations = Vec::new();
    for error_kind in [ErrorKind::Fp, ErrorKind::Fn] {
        for predictor in [Predictor::Warmth, Predictor::Competence] {
            let (result, error) = match associate_bias(&stats, &scores, error_kind, predictor) {
                Ok(a) => (Some(a), None),
                Err(e) => {
                    log::warn!("{error_kind} ~ {predictor} not fitted: {e}");
                    (None, Some(e.to_string()))
                }
            };
            associations.push(Association {
                error_kind,
                predictor,
                result,
                error,
            });
        }
    }
    let report = Report {
        predictions_source: source,
        config,
        baseline,
        scores,
        associations,
    };
    out.report("bias_association.json", &ctx.run, &report);
    out.text("plot_audit.py", plot_stub(PLOT));
    Ok(out)
}
