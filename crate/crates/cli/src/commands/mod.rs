mod associate;
mod audit;
mod disagree;
mod ingest;
mod rasch;
mod simulate;
mod stereotype;

use std::path::{Path, PathBuf};

use annobias_core::Execution;

use crate::args::{Cli, Command};
use crate::error::CliError;
use crate::output::{Outputs, RunConfig};

/// What every subcommand gets besides its own arguments.
pub struct Context {
    pub run: RunConfig,
    pub seed: u64,
    pub exec: Execution,
}

/// Input files named on the command line, in argument order.
pub fn inputs(command: &Command) -> Vec<&Path> {
    let paths: Vec<Option<&PathBuf>> = match command {
        Command::Ingest(a) => vec![Some(&a.annotations), a.posts.as_ref(), a.lexicon.as_ref()],
        Command::Disagree(a) => vec![Some(&a.annotations), a.posts.as_ref(), a.lexicon.as_ref()],
        Command::Rasch(a) => vec![Some(&a.input)],
        Command::Stereotype(a) => vec![
            a.embeddings.as_ref(),
            a.lexicon.as_ref(),
            a.warmth_dict.as_ref(),
            a.competence_dict.as_ref(),
            a.survey.as_ref(),
        ],
        Command::Associate(a) => vec![
            a.data.as_ref(),
            a.annotations.as_ref(),
            a.posts.as_ref(),
            a.lexicon.as_ref(),
            a.survey.as_ref(),
        ],
        Command::Audit(a) => vec![
            Some(&a.annotations),
            Some(&a.posts),
            Some(&a.lexicon),
            a.embeddings.as_ref(),
            a.warmth_dict.as_ref(),
            a.competence_dict.as_ref(),
            a.scores.as_ref(),
            a.predictions.as_ref(),
        ],
        Command::Simulate(_) => Vec::new(),
    };
    paths.into_iter().flatten().map(PathBuf::as_path).collect()
}

pub fn execute(cli: &Cli) -> Result<Outputs, CliError> {
    let exec = if cli.global.threads == Some(1) {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let ctx = Context {
        run: RunConfig::from_cli(cli),
        seed: cli.global.seed,
        exec,
    };
    match &cli.command {
        Command::Ingest(a) => ingest::run(a, &ctx),
        Command::Disagree(a) => disagree::run(a, &ctx),
        Command::Rasch(a) => rasch::run(a, &ctx),
        Command::Stereotype(a) => stereotype::run(a, &ctx),
        Command::Associate(a) => associate::run(a, &ctx),
        Command::Audit(a) => audit::run(a, &ctx),
        Command::Simulate(a) => simulate::run(a, &ctx),
    }
}

/// A plotting script for the CSVs of one subcommand. Requires pandas and
/// matplotlib; nothing in this tool depends on them.
pub fn plot_stub(body: &str) -> String {
    format!(
        "#!/usr/bin/env python3\n\
         import sys\n\
         import pandas as pd\n\
         import matplotlib.pyplot as plt\n\
         \n\
         d = sys.argv[1] if len(sys.argv) > 1 else \".\"\n\
         {body}\
         plt.tight_layout()\n\
         plt.show()\n"
    )
}
