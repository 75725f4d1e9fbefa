use indexmap::IndexMap;
use serde::Serialize;

use annobias_core::corpus::{load_annotations, load_lexicon, load_posts, mention_index};

use super::Context;
use crate::args::IngestArgs;
use crate::error::CliError;
use crate::output::{to_csv, Outputs};

#[derive(Serialize)]
struct CorpusSummary {
    n_posts: usize,
    /// Annotated items with no post text.
    items_without_post: usize,
    /// Posts nobody annotated.
    posts_without_annotations: usize,
}

#[derive(Serialize)]
struct MentionSummary {
    n_groups: usize,
    n_surface_forms: usize,
    n_mentions: usize,
    posts_with_mentions: usize,
    /// Posts mentioning each group, in lexicon order.
    posts_per_group: IndexMap<String, usize>,
}

#[derive(Serialize)]
struct IngestReport {
    n_annotations: usize,
    n_items: usize,
    n_annotators: usize,
    n_positive_labels: u64,
    n_majority_hate: usize,
    n_majority_ties: usize,
    n_single_annotation_items: usize,
    corpus: Option<CorpusSummary>,
    mentions: Option<MentionSummary>,
}

pub fn run(args: &IngestArgs, ctx: &Context) -> Result<Outputs, CliError> {
    let ann = load_annotations(&args.annotations)?;
    let posts = args.posts.as_ref().map(load_posts).transpose()?;
    let lexicon = args.lexicon.as_ref().map(load_lexicon).transpose()?;
    let majority = ann.majority_labels();

    let mut out = Outputs::new();
    out.text(
        "majority_labels.csv",
        to_csv(&majority, &["item_id", "label", "tied"]),
    );

    let corpus = posts.as_ref().map(|p| CorpusSummary {
        n_posts: p.len(),
        items_without_post: ann.item_ids().filter(|i| !p.contains(i)).count(),
        posts_without_annotations: p.iter().filter(|(id, _)| ann.counts(id).is_none()).count(),
    });
    let mut mentions = None;
    if let (Some(p), Some(lex)) = (&posts, &lexicon) {
        let (index, all) = mention_index(p, lex);
        let mut per_group: IndexMap<String, usize> =
            lex.groups().map(|g| (g.to_owned(), 0)).collect();
        for groups in index.values() {
            for g in groups {
                *per_group.entry(g.clone()).or_default() += 1;
            }
        }
        out.text(
            "mentions.csv",
            to_csv(
                &all,
                &["item_id", "group_id", "surface_form", "token_offset"],
            ),
        );
        mentions = Some(MentionSummary {
            n_groups: per_group.len(),
            n_surface_forms: lex.len(),
            n_mentions: all.len(),
            posts_with_mentions: index.values().filter(|g| !g.is_empty()).count(),
            posts_per_group: per_group,
        });
    }
    let report = IngestReport {
        n_annotations: ann.len(),
        n_items: ann.n_items(),
        n_annotators: ann.annotator_ids().count(),
        n_positive_labels: ann.item_counts().map(|(_, c)| c.n1).sum(),
        n_majority_hate: majority.iter().filter(|m| m.label == 1).count(),
        n_majority_ties: majority.iter().filter(|m| m.tied).count(),
        n_single_annotation_items: ann.item_counts().filter(|(_, c)| c.total() < 2).count(),
        corpus,
        mentions,
    };
    out.report("ingest_report.json", &ctx.run, &report);
    Ok(out)
}
