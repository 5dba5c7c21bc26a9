use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{origin}: malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Core(#[from] clustersync::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("iteration cap of {max_iters} reached before the threshold was met")]
    Capped { max_iters: usize },

    #[error("{failed} of {total} bound checks failed")]
    BoundFailures { failed: usize, total: usize },
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this failure class.
    pub fn exit_code(&self) -> i32 {
        use clustersync::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. } | CliError::Config { .. } => 3,
            CliError::Core(E::Config { .. }) => 3,
            CliError::Core(E::Topology(_) | E::Weights(_) | E::Shape(_)) => 4,
            CliError::Capped { .. } => 5,
            CliError::BoundFailures { .. } => 6,
            CliError::Core(_) | CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
