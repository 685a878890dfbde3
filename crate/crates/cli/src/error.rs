use std::fmt;

use serde_json::json;

/// Failure of a CLI run, carrying the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or output location.
    Usage(String),
    Core(weyllab_core::Error),
    /// Outputs were written but two independent methods disagree.
    Inconsistent(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Inconsistent(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.kind(),
            CliError::Inconsistent(_) => "oracle_inconsistency",
        }
    }

    /// One-line JSON report for stderr.
    pub fn report(&self) -> String {
        json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Inconsistent(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<weyllab_core::Error> for CliError {
    fn from(e: weyllab_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("cannot write output: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(format!("cannot write output: {e}"))
    }
}
