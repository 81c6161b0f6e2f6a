use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}: at {at}: {msg}")]
    Json { file: String, at: String, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] subspace_heights::Error),
}

impl CliError {
    /// 2 for unreadable or malformed input, 1 for everything that went wrong
    /// while computing.
    pub fn exit_code(&self) -> u8 {
        use subspace_heights::Error as E;
        match self {
            CliError::Io { .. } | CliError::Json { .. } | CliError::Usage(_) | CliError::Csv(_) => 2,
            CliError::Core(e) => match e {
                E::Parse { .. }
                | E::Io(_)
                | E::Json(_)
                | E::InvalidInput(_)
                | E::Dimension(_)
                | E::AmbientMismatch(..)
                | E::RankDeficient
                | E::ZeroVector
                | E::UnsupportedField(_)
                | E::FieldMismatch => 2,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
