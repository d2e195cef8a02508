use qacs_core::error::{AnalyticsError, SimError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("{failed} validation check(s) failed")]
    Validation { failed: usize },
}

impl CliError {
    /// 0 success, 1 usage, 2 configuration or output location, 3 numerical
    /// or validation failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config { .. } | CliError::Io { .. } => 2,
            CliError::Numerical(_) | CliError::Validation { .. } => 3,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(e) => CliError::Config {
                line: None,
                message: e.to_string(),
            },
            SimError::Plan(message) => CliError::Config {
                line: None,
                message,
            },
            SimError::Analytics(e) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AnalyticsError> for CliError {
    fn from(e: AnalyticsError) -> Self {
        CliError::Numerical(e.to_string())
    }
}
