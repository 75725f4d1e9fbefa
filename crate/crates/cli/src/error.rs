use std::fmt;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid arguments or inputs, including data a model cannot be fitted
    /// to. Exit code 2.
    Validation(String),
    /// Output could not be written. Exit code 1.
    Write(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Write(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Write(m) => f.write_str(m),
        }
    }
}

impl From<annobias_core::Error> for CliError {
    fn from(e: annobias_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
