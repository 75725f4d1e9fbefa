//! `key = value` configuration files.
//!
//! Each entry becomes a `--key value` pair appended after the command-line
//! arguments. Every flag overrides its own earlier occurrences, so entries in
//! the file take precedence over the command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::CommandFactory;

use crate::args::Cli;
use crate::error::CliError;

const SUBCOMMANDS: [&str; 7] = [
    "ingest",
    "disagree",
    "rasch",
    "stereotype",
    "associate",
    "audit",
    "simulate",
];

/// Locate the subcommand and a `--config` path in raw arguments.
fn scan(argv: &[OsString]) -> (Option<String>, Option<PathBuf>) {
    let mut sub = None;
    let mut config = None;
    let mut it = argv.iter().skip(1).peekable();
    while let Some(arg) = it.next() {
        let Some(s) = arg.to_str() else { continue };
        if s == "--config" {
            config = it.next().map(PathBuf::from);
        } else if let Some(v) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(v));
        } else if sub.is_none() && SUBCOMMANDS.contains(&s) {
            sub = Some(s.to_owned());
        }
    }
    (sub, config)
}

fn known_keys(subcommand: &str) -> Vec<String> {
    let root = Cli::command();
    let mut keys: Vec<String> = root
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_owned))
        .collect();
    if let Some(cmd) = root.find_subcommand(subcommand) {
        keys.extend(
            cmd.get_arguments()
                .filter_map(|a| a.get_long().map(str::to_owned)),
        );
    }
    keys.retain(|k| k != "config" && k != "help" && k != "version");
    keys
}

/// Parse a configuration file into `(key, value)` pairs, checking each key
/// against the flags of `subcommand`.
pub fn read_config(path: &Path, subcommand: &str) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let keys = known_keys(subcommand);
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Validation(format!(
                "{}:{line_no}: expected `key = value`",
                path.display()
            )));
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if !keys.contains(&key) {
            return Err(CliError::Validation(format!(
                "{}:{line_no}: unknown key `{}` for `{subcommand}`",
                path.display(),
                k.trim()
            )));
        }
        let value = v.trim().trim_matches('"').to_owned();
        out.push((key, value));
    }
    Ok(out)
}

/// The argument vector with configuration entries appended.
pub fn expand_argv(argv: Vec<OsString>) -> Result<(Vec<OsString>, Option<PathBuf>), CliError> {
    let (sub, config) = scan(&argv);
    let (Some(sub), Some(path)) = (sub, config.clone()) else {
        return Ok((argv, config));
    };
    let mut argv = argv;
    for (k, v) in read_config(&path, &sub)? {
        argv.push(format!("--{k}").into());
        argv.push(v.into());
    }
    Ok((argv, Some(path)))
}
