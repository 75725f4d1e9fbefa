use indexmap::IndexMap;
use serde::Serialize;

use annobias_core::corpus::load_lexicon;
use annobias_core::stereotype::{
    explicit_composites, load_dictionary, load_embeddings, load_survey, score_groups,
    warmth_alpha_by_group, CompositeOptions, EmbeddingLoadReport, RowRejection,
};

use super::{plot_stub, Context};
use crate::args::StereotypeArgs;
use crate::error::CliError;
use crate::output::{to_csv, Outputs};

#[derive(Serialize)]
struct Implicit {
    embeddings: EmbeddingLoadReport,
    dimension: usize,
    warmth_dictionary_size: usize,
    competence_dictionary_size: usize,
    n_scored: usize,
    n_failed: usize,
}

#[derive(Serialize)]
struct Explicit {
    /// Violence enters warmth as `9 − violence`.
    reverse_code_violence: bool,
    n_rows: usize,
    n_composites: usize,
    rejected_rows: Vec<RowRejection>,
    /// Cronbach's alpha of the three warmth traits within each group.
    warmth_alpha: IndexMap<String, f64>,
}

#[derive(Serialize)]
struct Report {
    implicit: Option<Implicit>,
    explicit: Option<Explicit>,
}

const PLOT: &str = "\
s = pd.read_csv(f\"{d}/stereotype_scores.csv\")
plt.scatter(s[\"warmth\"], s[\"competence\"])
for _, r in s.iterrows():
    plt.annotate(r[\"group_id\"], (r[\"warmth\"], r[\"competence\"]))
plt.xlabel(\"warmth\")
plt.ylabel(\"competence\")
";

pub fn run(args: &StereotypeArgs, ctx: &Context) -> Result<Outputs, CliError> {
    if args.embeddings.is_none() && args.survey.is_none() {
        return Err(CliError::Validation(
            "stereotype needs --embeddings (with --lexicon and both dictionaries) or --survey"
                .into(),
        ));
    }
    let mut out = Outputs::new();
    let mut report = Report {
        implicit: None,
        explicit: None,
    };

    if let (Some(e), Some(l), Some(w), Some(c)) = (
        &args.embeddings,
        &args.lexicon,
        &args.warmth_dict,
        &args.competence_dict,
    ) {
        let table = load_embeddings(e)?;
        let lexicon = load_lexicon(l)?;
        let warmth = load_dictionary(w, "warmth")?;
        let competence = load_dictionary(c, "competence")?;
        let scoring = score_groups(&lexicon, &warmth, &competence, &table, ctx.exec);
        for f in &scoring.failures {
            log::warn!("group {} not scored: {}", f.group_id, f.reason);
        }
        out.text("stereotype_scores.csv", scoring.to_csv());
        out.text(
            "stereotype_failures.csv",
            to_csv(&scoring.failures, &["group_id", "surface_form", "reason"]),
        );
        out.text("plot_stereotype.py", plot_stub(PLOT));
        report.implicit = Some(Implicit {
            embeddings: table.report().clone(),
            dimension: table.dim(),
            warmth_dictionary_size: warmth.words().len(),
            competence_dictionary_size: competence.words().len(),
            n_scored: scoring.scores.len(),
            n_failed: scoring.failures.len(),
        });
    }

    if let Some(s) = &args.survey {
        let rows = load_survey(s)?;
        let options = CompositeOptions {
            reverse_code_violence: args.reverse_code_violence,
        };
        let (composites, rejected) = explicit_composites(&rows, options);
        out.text(
            "explicit_composites.csv",
            to_csv(
                &composites,
                &["participant_id", "group_id", "warmth", "competence"],
            ),
        );
        report.explicit = Some(Explicit {
            reverse_code_violence: args.reverse_code_violence,
            n_rows: rows.len(),
            n_composites: composites.len(),
            rejected_rows: rejected,
            warmth_alpha: warmth_alpha_by_group(&rows, options),
        });
    }
    out.report("stereotype_report.json", &ctx.run, &report);
    Ok(out)
}
