use std::path::{Path, PathBuf};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Inputs that were read fine but make no sense to the algorithms.
    #[error(transparent)]
    Core(#[from] transit_robust_core::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    /// Unreadable or malformed file contents.
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn format(path: &Path, message: impl std::fmt::Display) -> Self {
        Error::Format { path: path.to_path_buf(), message: message.to_string() }
    }

    /// 1 for validation failures, 2 for anything that went wrong reading or
    /// writing files.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(_) | Error::Invalid(_) => 1,
            Error::Io { .. } | Error::Format { .. } => 2,
        }
    }
}
