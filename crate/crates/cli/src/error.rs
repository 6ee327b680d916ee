use thiserror::Error;

/// Command failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("{0}")]
    CapExceeded(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Tolerance(_) => 3,
            CliError::CapExceeded(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<neuropde::Error> for CliError {
    fn from(e: neuropde::Error) -> Self {
        use neuropde::Error as E;
        match e {
            E::Config(_) | E::Domain(_) | E::Range { .. } | E::Calibration(_) => CliError::Config(e.to_string()),
            E::CapExceeded { .. } => CliError::CapExceeded(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
