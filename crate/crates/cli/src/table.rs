//! Column-oriented CSV tables for model fitting.

use std::path::{Path, PathBuf};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct Table {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    /// Line number of each row in the file.
    lines: Vec<u64>,
}

impl Table {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let header: Vec<String> = r
            .headers()
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                CliError::Validation(format!("{}:{line}: {e}", path.display()))
            })?;
            lines.push(rec.position().map_or(0, |p| p.line()));
            rows.push(rec.iter().map(str::to_owned).collect());
        }
        Ok(Self {
            path: path.to_owned(),
            header,
            rows,
            lines,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn index(&self, name: &str) -> Result<usize, CliError> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Validation(format!("{}:1: no column `{name}`", self.path.display()))
        })
    }

    pub fn strings(&self, name: &str) -> Result<Vec<&str>, CliError> {
        let j = self.index(name)?;
        Ok(self.rows.iter().map(|r| r[j].as_str()).collect())
    }

    /// Numeric column; blank and `NA` cells are `None`.
    pub fn numbers(&self, name: &str) -> Result<Vec<Option<f64>>, CliError> {
        let j = self.index(name)?;
        self.rows
            .iter()
            .zip(&self.lines)
            .map(|(r, line)| match r[j].as_str() {
                "" | "NA" | "na" => Ok(None),
                v => v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .map(Some)
                    .ok_or_else(|| {
                        CliError::Validation(format!(
                            "{}:{line}: column `{name}` has non-numeric value `{v}`",
                            self.path.display()
                        ))
                    }),
            })
            .collect()
    }
}
