use std::path::PathBuf;

use dicke_core::DickeError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Model(#[from] DickeError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cache entry {path} is unusable: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("recipe `{recipe}` needs dataset `{missing}`; archive has [{available}]")]
    Recipe {
        recipe: String,
        missing: String,
        available: String,
    },
}

impl LabError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 configuration, 3 numerical, 4 convergence or
    /// truncation, 1 anything else (file system).
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config { .. } | LabError::Recipe { .. } => 2,
            LabError::Model(e) => match e {
                DickeError::Parameter(_) => 2,
                DickeError::Truncation { .. } | DickeError::Support(_) => 4,
                _ => 3,
            },
            LabError::Io { .. } | LabError::Cache { .. } => 1,
        }
    }
}
