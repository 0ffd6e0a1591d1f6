use std::path::Path;

use spectral_series::ErrorKind;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Process exit codes.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spectral_series::Error),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid model archive: {0}")]
    Archive(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Numerical => EXIT_NUMERICAL,
                ErrorKind::Io => EXIT_IO,
            },
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } | CliError::Archive(_) => EXIT_IO,
            CliError::Check(_) => EXIT_CHECK_FAILED,
        }
    }

    pub(crate) fn io(path: &Path, what: &str, source: std::io::Error) -> Self {
        CliError::Io {
            context: format!("{what} {}", path.display()),
            source,
        }
    }
}
