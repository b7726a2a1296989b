use thiserror::Error;

/// Command failure, mapped onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("integration failed: {0}")]
    NonFinite(String),
    #[error("{0}")]
    Io(String),
    /// A check or comparison ran to completion but did not pass.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::NonFinite(_) => 3,
        }
    }
}

impl From<symtop::Error> for CliError {
    fn from(e: symtop::Error) -> Self {
        match e {
            symtop::Error::NonFinite { .. } => CliError::NonFinite(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
