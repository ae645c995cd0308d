use std::path::PathBuf;

use graphspectra_core::Error as CoreError;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

/// Process exit status for each error class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Config = 2,
    Data = 3,
    Numerical = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Config(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge ({i}, {j}) has conflicting weights {first} and {second}")]
    AsymmetricWeight {
        i: usize,
        j: usize,
        first: f64,
        second: f64,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn status(&self) -> ExitStatus {
        match self {
            Self::Config(_) => ExitStatus::Config,
            Self::Parse { .. }
            | Self::AsymmetricWeight { .. }
            | Self::Io { .. }
            | Self::Csv { .. } => ExitStatus::Data,
            Self::Core(e) => core_status(e),
        }
    }
}

fn core_status(e: &CoreError) -> ExitStatus {
    use CoreError::*;
    match e {
        DegreeTooLarge(_) | InvalidParameters(_) | InvalidOrder(_) | InvalidPivot(_)
        | InvalidDensity(_) | InvalidWarp(_) => ExitStatus::Config,
        NoConvergence(_)
        | NonMonotoneEsd(_)
        | NotParseval
        | DomainMismatch { .. }
        | OutOfDomain { .. } => ExitStatus::Numerical,
        _ => ExitStatus::Data,
    }
}
