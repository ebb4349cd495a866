use std::io;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown model {name:?} (registered: {registered})")]
    UnknownModel { name: String, registered: String },

    #[error("cannot read table {path}: {msg}")]
    Table { path: String, msg: String },

    #[error(transparent)]
    Compute(#[from] abcdic_core::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    /// Process exit status for this error. Usage errors reported by the
    /// argument parser exit with 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::UnknownModel { .. } => 4,
            CliError::Table { .. } => 5,
            CliError::Compute(_) => 6,
            CliError::Io { .. } => 7,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn table(path: &Path, msg: impl Into<String>) -> Self {
        CliError::Table {
            path: path.display().to_string(),
            msg: msg.into(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
