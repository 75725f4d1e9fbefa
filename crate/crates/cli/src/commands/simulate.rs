use serde::Serialize;

use annobias_core::pipeline::response_matrix;
use annobias_core::simulate::{
    simulate_annotations, simulate_audit_scenario, simulate_rasch, AuditScenarioConfig, SimConfig,
};
use annobias_core::stereotype::{survey_to_csv, Dictionary};

use super::Context;
use crate::args::{Scenario, SimulateArgs};
use crate::error::CliError;
use crate::output::Outputs;

fn dictionary_text(d: &Dictionary) -> String {
    d.words().iter().map(|w| format!("{w}\n")).collect()
}

#[derive(Serialize)]
struct RaschTruth {
    seed: u64,
    n_persons: usize,
    n_items: usize,
    person_ids: Vec<String>,
    theta: Vec<f64>,
    item_ids: Vec<String>,
    delta: Vec<f64>,
}

pub fn run(args: &SimulateArgs, ctx: &Context) -> Result<Outputs, CliError> {
    let mut out = Outputs::new();
    match args.scenario {
        Scenario::Study1 => {
            let config = SimConfig {
                n_participants: args.participants,
                n_groups: args.groups.unwrap_or(SimConfig::default().n_groups),
                items_per_group: args.items_per_group,
                annotators_per_item: args.annotators_per_item,
                b_competence: args.b_competence,
                b_warmth: args.b_warmth,
                ..SimConfig::default()
            };
            let data = simulate_annotations(&config, ctx.seed)?;
            out.text("annotations.csv", data.annotations.to_csv());
            out.text("posts.jsonl", data.posts.to_jsonl());
            out.text("lexicon.tsv", data.lexicon.to_tsv());
            out.text("survey.csv", survey_to_csv(&data.survey));
            out.text(
                "responses.csv",
                response_matrix(&data.annotations)?.to_wide_csv(),
            );
            out.report("truth.json", &ctx.run, &data.truth);
        }
        Scenario::Audit => {
            let config = AuditScenarioConfig {
                n_items: args.items,
                n_groups: args
                    .groups
                    .unwrap_or(AuditScenarioConfig::default().n_groups),
                fp_slope: args.fp_slope,
                ..AuditScenarioConfig::default()
            };
            let s = simulate_audit_scenario(&config, ctx.seed)?;
            out.text("annotations.csv", s.annotations.to_csv());
            out.text("posts.jsonl", s.posts.to_jsonl());
            out.text("lexicon.tsv", s.lexicon.to_tsv());
            out.text("embeddings.txt", s.embeddings.to_text());
            out.text("warmth.txt", dictionary_text(&s.warmth_dictionary));
            out.text("competence.txt", dictionary_text(&s.competence_dictionary));
            out.report("truth.json", &ctx.run, &s.truth);
        }
        Scenario::Rasch => {
            let (matrix, theta, delta) = simulate_rasch(args.persons, args.rasch_items, ctx.seed)?;
            out.text("responses.csv", matrix.to_wide_csv());
            let truth = RaschTruth {
                seed: ctx.seed,
                n_persons: args.persons,
                n_items: args.rasch_items,
                person_ids: matrix.person_ids().to_vec(),
                theta,
                item_ids: matrix.item_ids().to_vec(),
                delta,
            };
            out.report("truth.json", &ctx.run, &truth);
        }
    }
    Ok(out)
}
