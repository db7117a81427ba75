use std::path::PathBuf;

use thiserror::Error;

/// Exit codes: 1 failed verification, 2 bad input, 3 numerical or I/O failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Numeric(cvsteer::Error),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

impl From<cvsteer::Error> for CliError {
    fn from(e: cvsteer::Error) -> Self {
        use cvsteer::Error as E;
        match e {
            E::Domain { .. }
            | E::InvalidSweep(_)
            | E::NotPhysical { .. }
            | E::NotSymmetric { .. }
            | E::DegreeTooHigh { .. }
            | E::NoTmstPreimage { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
