use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller supplied malformed or inconsistent input.
    Input,
    /// A numerical routine could not produce a trustworthy answer.
    Numerical,
    /// Reading or writing a file failed.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("response column `{0}` not found")]
    MissingColumn(String),

    #[error("row {0} has zero norm")]
    ZeroRow(usize),

    #[error("row {0} of the kernel matrix sums to zero")]
    ZeroRowSum(usize),

    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("eigenvalue {index} = {value:.3e} is below the floor {floor:.3e}")]
    EigenvalueBelowFloor { index: usize, value: f64, floor: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidInput(_)
            | Error::Parse { .. }
            | Error::MissingColumn(_)
            | Error::ZeroRow(_) => ErrorKind::Input,
            Error::ZeroRowSum(_)
            | Error::NotSymmetric(_)
            | Error::EigenvalueBelowFloor { .. }
            | Error::Numerical(_) => ErrorKind::Numerical,
            Error::Io { .. } => ErrorKind::Io,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
