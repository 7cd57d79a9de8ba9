use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration key `{key}`: {reason}")]
    ConfigInvalid { key: String, reason: String },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: sectoral_core::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot serialize report: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::ConfigInvalid { key: key.into(), reason: reason.into() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Attaches a parameter context to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> Context<T> for sectoral_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|source| CliError::Core { context: what(), source })
    }
}
