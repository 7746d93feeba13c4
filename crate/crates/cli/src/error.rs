use thiserror::Error;

/// Every failure the CLI can report, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, malformed oracles, promise violations.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input files.
    #[error("{0}")]
    Input(String),
    /// A computed result failed its own consistency checks.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Internal(_) => "internal",
        }
    }

    /// `qpair: error[kind]: message` on a single line.
    pub fn line(&self) -> String {
        let msg = self
            .to_string()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        format!("qpair: error[{}]: {msg}", self.kind())
    }
}

impl From<qpair_core::Error> for CliError {
    fn from(e: qpair_core::Error) -> Self {
        match e {
            qpair_core::Error::Invariant(_) => CliError::Internal(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}
