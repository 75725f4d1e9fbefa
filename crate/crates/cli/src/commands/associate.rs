use serde::Serialize;

use annobias_core::corpus::{load_annotations, load_lexicon, load_posts, mention_index};
use annobias_core::glm::{fit_glm, rate_ratio, DesignMatrix, Family, GlmFit, GlmOptions};
use annobias_core::pipeline::{
    fit_disagreement, fit_hate_counts, study1_table, EffectsSpec, Study1Fit,
};
use annobias_core::stereotype::{explicit_composites, load_survey, CompositeOptions};

use super::Context;
use crate::args::{AssociateArgs, FamilyArg};
use crate::error::CliError;
use crate::model_spec::ModelSpec;
use crate::output::{to_csv, Outputs};
use crate::table::Table;

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Poisson => Family::Poisson,
            FamilyArg::Binomial => Family::Binomial,
            FamilyArg::Gaussian => Family::Gaussian,
        }
    }
}

#[derive(Serialize)]
struct Effect {
    name: String,
    /// `100·(exp(β) − 1)`: percent change in the rate (Poisson) or the odds
    /// (binomial) per unit of the predictor.
    percent_change: f64,
}

#[derive(Serialize)]
struct TableReport {
    model: String,
    offset: Option<String>,
    weights: Option<String>,
    clusters: Vec<String>,
    n_rows_read: usize,
    /// Rows with a blank or `NA` cell in a used column.
    n_rows_dropped: usize,
    effects: Vec<Effect>,
    fit: GlmFit,
}

fn effects(fit: &GlmFit) -> Vec<Effect> {
    fit.names
        .iter()
        .zip(&fit.coefficients)
        .filter(|(n, _)| *n != "(Intercept)")
        .map(|(n, &b)| Effect {
            name: n.clone(),
            percent_change: rate_ratio(b),
        })
        .collect()
}

fn fit_table(
    args: &AssociateArgs,
    data: &std::path::Path,
    ctx: &Context,
) -> Result<Outputs, CliError> {
    let model = args
        .model
        .as_deref()
        .ok_or_else(|| CliError::Validation("--data needs --model \"response ~ terms\"".into()))?;
    let spec = ModelSpec::parse(model)?;
    let table = Table::load(data)?;

    let y = table.numbers(&spec.response)?;
    let terms: Vec<Vec<Option<f64>>> = spec
        .terms
        .iter()
        .map(|t| table.numbers(t))
        .collect::<Result<_, _>>()?;
    let (offset_col, offset_log) = match args.offset.as_deref().map(str::trim) {
        Some(o) => match o.strip_prefix("log(").and_then(|r| r.strip_suffix(')')) {
            Some(inner) => (Some(table.numbers(inner.trim())?), true),
            None => (Some(table.numbers(o)?), false),
        },
        None => (None, false),
    };
    let weights = args
        .weights
        .as_deref()
        .map(|w| table.numbers(w))
        .transpose()?;
    let clusters: Vec<Vec<&str>> = args
        .cluster
        .iter()
        .map(|c| table.strings(c))
        .collect::<Result<_, _>>()?;

    let keep: Vec<usize> = (0..table.n_rows())
        .filter(|&i| {
            y[i].is_some()
                && terms.iter().all(|t| t[i].is_some())
                && offset_col.as_ref().is_none_or(|o| o[i].is_some())
                && weights.as_ref().is_none_or(|w| w[i].is_some())
                && clusters.iter().all(|c| !c[i].is_empty())
        })
        .collect();
    if keep.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no complete rows for `{model}`",
            data.display()
        )));
    }
    let pick =
        |col: &[Option<f64>]| -> Vec<f64> { keep.iter().map(|&i| col[i].unwrap_or(0.0)).collect() };

    let n = keep.len();
    let mut x = if spec.intercept {
        DesignMatrix::with_intercept(n)
    } else {
        DesignMatrix::new(n)
    };
    for (name, col) in spec.terms.iter().zip(&terms) {
        x.push_column(name.clone(), pick(col))?;
    }
    for (name, col) in args.cluster.iter().zip(&clusters) {
        let ids: Vec<&str> = keep.iter().map(|&i| col[i]).collect();
        x.push_cluster(name, &ids)?;
    }
    if let Some(o) = &offset_col {
        let mut o = pick(o);
        if offset_log {
            if let Some(bad) = o.iter().find(|v| **v <= 0.0) {
                return Err(CliError::Validation(format!(
                    "{}: offset column has non-positive value {bad} under log()",
                    data.display()
                )));
            }
            o.iter_mut().for_each(|v| *v = v.ln());
        }
        x.set_offset(o)?;
    }
    let options = GlmOptions {
        weights: weights.as_deref().map(pick),
        ..GlmOptions::default()
    };
    let fit = fit_glm(&x, &pick(&y), args.family.into(), &options)?;
    if !fit.converged {
        log::warn!("fit did not converge in {} iterations", fit.iterations);
    }
    let report = TableReport {
        model: model.to_owned(),
        offset: args.offset.clone(),
        weights: args.weights.clone(),
        clusters: args.cluster.clone(),
        n_rows_read: table.n_rows(),
        n_rows_dropped: table.n_rows() - n,
        effects: effects(&fit),
        fit,
    };
    let mut out = Outputs::new();
    out.report("associate_fit.json", &ctx.run, &report);
    Ok(out)
}

#[derive(Serialize)]
struct Study1Model {
    fit: Option<Study1Fit>,
    effects: Vec<Effect>,
    error: Option<String>,
}

impl Study1Model {
    fn from(result: annobias_core::Result<Study1Fit>) -> Self {
        match result {
            Ok(f) => Self {
                effects: effects(&f.fit),
                fit: Some(f),
                error: None,
            },
            Err(e) => {
                log::warn!("model not fitted: {e}");
                Self {
                    fit: None,
                    effects: Vec::new(),
                    error: Some(e.to_string()),
                }
            }
        }
    }
}

#[derive(Serialize)]
struct Study1Report {
    reverse_code_violence: bool,
    n_rows: usize,
    n_rejected_survey_rows: usize,
    /// Poisson model of hate-label counts with `log(n_items)` offset.
    hate_counts: Study1Model,
    /// Binomial model of group-level disagreement.
    disagreement: Study1Model,
}

fn fit_study1(args: &AssociateArgs, ctx: &Context) -> Result<Outputs, CliError> {
    let missing =
        || CliError::Validation("--annotations needs --posts, --lexicon and --survey".into());
    let ann = load_annotations(args.annotations.as_ref().ok_or_else(missing)?)?;
    let posts = load_posts(args.posts.as_ref().ok_or_else(missing)?)?;
    let lexicon = load_lexicon(args.lexicon.as_ref().ok_or_else(missing)?)?;
    let survey = load_survey(args.survey.as_ref().ok_or_else(missing)?)?;
    let (index, _) = mention_index(&posts, &lexicon);
    let groups: Vec<String> = lexicon.groups().map(str::to_owned).collect();
    let (composites, rejected) = explicit_composites(
        &survey,
        CompositeOptions {
            reverse_code_violence: args.reverse_code_violence,
        },
    );
    let rows = study1_table(&ann, &index, &groups, &composites, ctx.exec)?;
    let spec = EffectsSpec::default();
    let report = Study1Report {
        reverse_code_violence: args.reverse_code_violence,
        n_rows: rows.len(),
        n_rejected_survey_rows: rejected.len(),
        hate_counts: Study1Model::from(fit_hate_counts(&rows, spec)),
        disagreement: Study1Model::from(fit_disagreement(&rows, spec)),
    };
    let mut out = Outputs::new();
    out.text(
        "study1_table.csv",
        to_csv(
            &rows,
            &[
                "participant_id",
                "group_id",
                "n_items",
                "hate_count",
                "disagreement",
                "n_comparisons",
                "tendency",
                "tendency_extremal",
                "warmth",
                "competence",
            ],
        ),
    );
    out.report("study1_fits.json", &ctx.run, &report);
    Ok(out)
}

pub fn run(args: &AssociateArgs, ctx: &Context) -> Result<Outputs, CliError> {
    match &args.data {
        Some(data) => fit_table(args, data, ctx),
        None if args.annotations.is_some() => fit_study1(args, ctx),
        None => Err(CliError::Validation(
            "associate needs --data with --model, or --annotations with --posts, --lexicon and --survey"
                .into(),
        )),
    }
}
