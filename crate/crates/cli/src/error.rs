use std::path::{Path, PathBuf};

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or invalid input; `field` is a JSON pointer when one applies.
    #[error("{}: {}{message}", path.display(), field.as_deref().map(|f| format!("at {f}: ")).unwrap_or_default())]
    Invalid {
        path: PathBuf,
        field: Option<String>,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } | CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Mismatch(_) => 4,
            CliError::Io { .. } => 2,
            CliError::Output(_) => 1,
        }
    }

    pub fn invalid(path: &Path, field: Option<String>, message: impl Into<String>) -> Self {
        CliError::Invalid {
            path: path.to_path_buf(),
            field,
            message: message.into(),
        }
    }

    /// Attributes a library error to the input file it came from.
    pub fn from_model(path: &Path, e: meshroof::Error) -> Self {
        match e {
            meshroof::Error::Config { field, message } => CliError::invalid(path, Some(field), message),
            meshroof::Error::Infeasible(m) => CliError::Infeasible(format!("{}: {m}", path.display())),
            other => CliError::invalid(path, None, other.to_string()),
        }
    }

    /// A library error not tied to one input file.
    pub fn model(e: meshroof::Error) -> Self {
        match e {
            meshroof::Error::Infeasible(m) => CliError::Infeasible(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
