use serde::Serialize;

use annobias_core::corpus::{load_annotations, load_lexicon, load_posts, mention_index};
use annobias_core::disagreement::{
    agreement_report, group_disagreements, item_disagreements, participant_disagreements,
    AgreementReport,
};
use annobias_core::pipeline::{disagreement_contrast, DisagreementContrast};

use super::{plot_stub, Context};
use crate::args::DisagreeArgs;
use crate::error::CliError;
use crate::output::{to_csv, Outputs};

#[derive(Serialize)]
struct Report {
    agreement: AgreementReport,
    /// Majority-hate against majority-non-hate item disagreement.
    contrast: Option<DisagreementContrast>,
    contrast_error: Option<String>,
}

const PLOT: &str = "\
items = pd.read_csv(f\"{d}/item_disagreement.csv\")
items[\"d\"].plot.hist(bins=20)
plt.xlabel(\"item disagreement\")
";

pub fn run(args: &DisagreeArgs, ctx: &Context) -> Result<Outputs, CliError> {
    let ann = load_annotations(&args.annotations)?;
    let mut out = Outputs::new();
    out.text(
        "item_disagreement.csv",
        to_csv(&item_disagreements(&ann), &["item_id", "n1", "n0", "d"]),
    );
    out.text(
        "participant_disagreement.csv",
        to_csv(
            &participant_disagreements(&ann),
            &["participant_id", "item_id", "d", "n_differing", "n_others"],
        ),
    );
    if let (Some(p), Some(l)) = (&args.posts, &args.lexicon) {
        let posts = load_posts(p)?;
        let lexicon = load_lexicon(l)?;
        let (index, _) = mention_index(&posts, &lexicon);
        let groups: Vec<String> = lexicon.groups().map(str::to_owned).collect();
        out.text(
            "group_disagreement.csv",
            to_csv(
                &group_disagreements(&ann, &index, &groups),
                &[
                    "participant_id",
                    "group_id",
                    "d",
                    "n_items",
                    "n_comparisons",
                ],
            ),
        );
    }
    let agreement = agreement_report(&ann)?;
    let (contrast, contrast_error) =
        match disagreement_contrast(&ann, args.permutations, ctx.seed, ctx.exec) {
            Ok(c) => (Some(c), None),
            Err(e) => {
                log::warn!("disagreement contrast unavailable: {e}");
                (None, Some(e.to_string()))
            }
        };
    out.report(
        "agreement.json",
        &ctx.run,
        &Report {
            agreement,
            contrast,
            contrast_error,
        },
    );
    out.text("plot_disagreement.py", plot_stub(PLOT));
    Ok(out)
}
