use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] tileupb::Error),
}

impl CliError {
    /// 2 for anything the caller got wrong, 1 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Input { .. } => 2,
            CliError::Core(tileupb::Error::Argument(_)) => 2,
            CliError::Core(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
