//! Buffered outputs and the run metadata embedded in every report.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::args::{Cli, Command};
use crate::error::CliError;

/// The resolved invocation: global flags plus every option of the
/// subcommand after defaults and configuration entries were applied.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: u64,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub config_file: Option<PathBuf>,
    pub options: Value,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Self {
        let options = match &cli.command {
            Command::Ingest(a) => serde_json::to_value(a),
            Command::Disagree(a) => serde_json::to_value(a),
            Command::Rasch(a) => serde_json::to_value(a),
            Command::Stereotype(a) => serde_json::to_value(a),
            Command::Associate(a) => serde_json::to_value(a),
            Command::Audit(a) => serde_json::to_value(a),
            Command::Simulate(a) => serde_json::to_value(a),
        }
        .expect("argument structs serialize");
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: cli.command.name(),
            seed: cli.global.seed,
            out: cli.global.out.clone(),
            threads: cli.global.threads,
            config_file: cli.global.config.clone(),
            options,
        }
    }
}

/// Files produced by a subcommand, held in memory until the run succeeds.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, name: &str, content: impl Into<String>) {
        self.files
            .push((name.to_owned(), content.into().into_bytes()));
    }

    /// A pretty-printed JSON report with the run configuration under `run`.
    pub fn report<T: Serialize>(&mut self, name: &str, run: &RunConfig, body: &T) {
        let mut value = serde_json::to_value(body).expect("reports serialize");
        let run = serde_json::to_value(run).expect("run config serializes");
        let value = match value {
            Value::Object(ref mut map) => {
                let mut out = serde_json::Map::new();
                out.insert("run".into(), run);
                out.append(map);
                Value::Object(out)
            }
            other => serde_json::json!({ "run": run, "result": other }),
        };
        let mut s = serde_json::to_string_pretty(&value).expect("reports serialize");
        s.push('\n');
        self.files.push((name.to_owned(), s.into_bytes()));
    }

    /// Write every file into `dir`. If any write fails, the files written by
    /// this call are removed again.
    pub fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| CliError::Write(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, bytes) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                if created_dir {
                    let _ = fs::remove_dir(dir);
                }
                return Err(CliError::Write(format!("{}: {e}", path.display())));
            }
            written.push(path);
        }
        Ok(written)
    }
}

/// Serialize rows with a header taken from the struct's field names.
pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).expect("in-memory write");
    }
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is utf-8")
}
