use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("plan error: {0}")]
    Plan(hyperjaya_core::Error),
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
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Core(hyperjaya_core::Error),
}

impl HarnessError {
    /// Process exit code: 2 configuration, 3 plan, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Core(_) => 2,
            HarnessError::Plan(_) => 3,
            HarnessError::Io { .. } | HarnessError::Csv { .. } | HarnessError::Parse { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        match source.kind() {
            csv::ErrorKind::Io(_) => {
                let path = path.into();
                match source.into_kind() {
                    csv::ErrorKind::Io(e) => HarnessError::Io { path, source: e },
                    _ => unreachable!(),
                }
            }
            _ => HarnessError::Csv {
                path: path.into(),
                source,
            },
        }
    }
}

impl From<hyperjaya_core::Error> for HarnessError {
    fn from(e: hyperjaya_core::Error) -> Self {
        if e.is_plan_error() {
            HarnessError::Plan(e)
        } else {
            HarnessError::Core(e)
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
