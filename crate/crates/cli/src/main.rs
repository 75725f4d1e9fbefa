mod args;
mod commands;
mod config;
mod error;
mod model_spec;
mod output;
mod table;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(argv: Vec<std::ffi::OsString>) -> Result<(), CliError> {
    let (argv, _) = config::expand_argv(argv)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code == 0 {
                return Ok(());
            }
            std::process::exit(code);
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--threads: {e}")))?;
    }
    for path in commands::inputs(&cli.command) {
        if !path.exists() {
            return Err(CliError::Validation(format!(
                "{}: input file does not exist",
                path.display()
            )));
        }
    }
    let outputs = commands::execute(&cli)?;
    let written = outputs.commit(&cli.global.out)?;
    for p in written {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}
