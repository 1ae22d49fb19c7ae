use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes, one per failure class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INTERNAL: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const DATA: u8 = 4;
    pub const CERTIFICATE: u8 = 5;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Data(String),

    #[error("{failed} certificate check(s) failed")]
    CertificateFailure { failed: usize },

    #[error("{0}")]
    CertificateMismatch(String),

    #[error("trace {path}: {message}")]
    Trace { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] mirrorboost::Error),

    #[error("{0}")]
    Internal(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use mirrorboost::Error as E;
        match self {
            HarnessError::Usage(_) => exit::USAGE,
            HarnessError::Io { .. } => exit::IO,
            HarnessError::Data(_) | HarnessError::Trace { .. } => exit::DATA,
            HarnessError::CertificateFailure { .. } | HarnessError::CertificateMismatch(_) => {
                exit::CERTIFICATE
            }
            HarnessError::Internal(_) => exit::INTERNAL,
            HarnessError::Core(e) => match e {
                E::NegativeStep(_)
                | E::MissingParameter { .. }
                | E::InvalidParameter { .. }
                | E::IncompatibleProx { .. }
                | E::NoIterations => exit::USAGE,
                E::DimensionMismatch { .. } | E::ScheduleExhausted(_) | E::ZeroStepSum => {
                    exit::INTERNAL
                }
                _ => exit::DATA,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
