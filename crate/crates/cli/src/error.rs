use std::path::Path;

use thiserror::Error;

/// Everything that ends a run early, each with its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// A property check failed.
    #[error("{0}")]
    Validation(String),
    #[error("{path}:{line}: {message}")]
    Input {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    InputFile { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Input { .. } | CliError::InputFile { .. } => 2,
            CliError::Usage(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn input(path: &Path, line: u64, message: impl Into<String>) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }

    pub fn input_file(path: &Path, message: impl Into<String>) -> Self {
        CliError::InputFile {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
