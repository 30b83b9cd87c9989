use std::path::PathBuf;

use coevo_core::ModelError;
use thiserror::Error;

/// Process exit status for configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit status for numerical failures during a run.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Model(#[from] ModelError),

    /// Some replicates failed; the rest ran to completion.
    #[error("{} of {total} replicates failed; first: replicate {} (seed {}): {}",
        failed.len(), failed[0].0, failed[0].1, failed[0].2)]
    Replicates {
        total: usize,
        failed: Vec<(usize, u64, ModelError)>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Parse { .. } => EXIT_CONFIG,
            Self::Model(e) => model_exit_code(e),
            Self::Replicates { failed, .. } => model_exit_code(&failed[0].2),
            Self::Io { .. } | Self::Csv { .. } => 1,
        }
    }
}

fn model_exit_code(e: &ModelError) -> i32 {
    match e {
        ModelError::TimeStepTooLarge { .. } => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
