use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("unknown preset `{name}` (available: {available})")]
    UnknownPreset { name: String, available: String },

    #[error("{context}: {source}")]
    Library {
        context: String,
        #[source]
        source: mqv::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("writing {}: {message}", path.display())]
    Emit { path: PathBuf, message: String },
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Validation(_) | CliError::UnknownPreset { .. } => 2,
            CliError::Library { source, .. } if source.is_validation() => 2,
            CliError::Library { .. } => 3,
            CliError::Io { .. } | CliError::Emit { .. } => 1,
        }
    }
}

pub trait Context<T> {
    fn ctx(self, context: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for mqv::Result<T> {
    fn ctx(self, context: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Library {
            context: context.into(),
            source,
        })
    }
}
