use std::fmt::Display;

/// Failures of a command, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or invalid scenario, flag or input file.
    #[error("configuration error: {0}")]
    Config(String),
    /// The computation contradicted an identity or a bound it must satisfy.
    #[error("numerical consistency failure: {0}")]
    Consistency(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(e: impl Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Consistency(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<hycov_core::Error> for CliError {
    fn from(e: hycov_core::Error) -> Self {
        use hycov_core::Error as E;
        match e {
            E::Domain(_) | E::Invalid(_) | E::Unsupported(_) => CliError::Config(e.to_string()),
            E::NotPositiveDefinite { .. } | E::Numerical(_) => CliError::Consistency(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
