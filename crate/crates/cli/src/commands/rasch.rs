use serde::Serialize;

use annobias_core::psychometrics::{
    estimate_tendencies, fit_rasch_cml, RaschFit, RaschOptions, ResponseMatrix,
};

use super::{plot_stub, Context};
use crate::args::RaschArgs;
use crate::error::CliError;
use crate::output::{to_csv, Outputs};

#[derive(Serialize)]
struct Difficulty<'a> {
    item_id: &'a str,
    difficulty: f64,
    se: f64,
}

#[derive(Serialize)]
struct Estimator {
    method: &'static str,
    normalization: &'static str,
    extremal_scores: &'static str,
    options: RaschOptions,
}

#[derive(Serialize)]
struct Report {
    estimator: Estimator,
    n_persons: usize,
    n_items: usize,
    /// Rows without any answered item.
    dropped_persons: Vec<String>,
    n_extremal_tendencies: usize,
    fit: RaschFit,
}

const PLOT: &str = "\
items = pd.read_csv(f\"{d}/difficulties.csv\").sort_values(\"difficulty\")
plt.errorbar(items[\"difficulty\"], range(len(items)), xerr=1.96 * items[\"se\"], fmt=\"o\")
plt.yticks(range(len(items)), items[\"item_id\"])
plt.xlabel(\"difficulty\")
";

pub fn run(args: &RaschArgs, ctx: &Context) -> Result<Outputs, CliError> {
    let matrix = ResponseMatrix::load_wide_csv(&args.input)?;
    let options = RaschOptions {
        tolerance: args.tolerance,
        max_iterations: args.max_iterations,
    };
    let fit = fit_rasch_cml(&matrix, &options)?;
    if !fit.converged {
        log::warn!(
            "Rasch fit stopped after {} iterations (max gradient {:e})",
            fit.iterations,
            fit.max_abs_gradient
        );
    }
    let tendencies = estimate_tendencies(&matrix, &fit.difficulties)?;
    let difficulties: Vec<Difficulty> = fit
        .item_ids
        .iter()
        .zip(fit.difficulties.iter().zip(&fit.standard_errors))
        .map(|(id, (&difficulty, &se))| Difficulty {
            item_id: id,
            difficulty,
            se,
        })
        .collect();

    let mut out = Outputs::new();
    out.text(
        "difficulties.csv",
        to_csv(&difficulties, &["item_id", "difficulty", "se"]),
    );
    out.text(
        "tendencies.csv",
        to_csv(
            &tendencies,
            &["person_id", "theta", "raw_score", "n_answered", "extremal"],
        ),
    );
    let report = Report {
        estimator: Estimator {
            method: "conditional maximum likelihood",
            normalization: "difficulties sum to zero",
            extremal_scores: "zero and perfect raw scores excluded from item estimation; \
                              their tendencies use the score moved 0.5 inward and are flagged",
            options,
        },
        n_persons: matrix.n_persons(),
        n_items: matrix.n_items(),
        dropped_persons: matrix.dropped_persons().to_vec(),
        n_extremal_tendencies: tendencies.iter().filter(|t| t.extremal).count(),
        fit,
    };
    out.report("rasch_report.json", &ctx.run, &report);
    out.text("plot_rasch.py", plot_stub(PLOT));
    Ok(out)
}
