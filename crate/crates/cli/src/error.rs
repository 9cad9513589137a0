use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("predictor unavailable: {0}")]
    PredictorUnavailable(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] ira_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for rank failures, 4 when no predictor
    /// can be reached, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::PredictorUnavailable(_) => 4,
            Self::Core(ira_core::Error::RankDeficient { .. } | ira_core::Error::IllConditioned(_)) => 3,
            Self::Core(ira_core::Error::Predictor(_)) => 4,
            Self::Io { .. } | Self::Core(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
