use std::path::PathBuf;

use jtd_core::JtdError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] JtdError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for bad input, 3 for numerical failures, 4 when a solver gave up.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Model(e) => match e {
                JtdError::InvalidParameter { .. }
                | JtdError::NotNormalized { .. }
                | JtdError::EmptySector { .. }
                | JtdError::WindowEdge { .. } => 2,
                JtdError::NoConvergence { .. } => 4,
                JtdError::DegenerateGeometry { .. } | JtdError::PhaseDomain { .. } | JtdError::Numerical(_) => 3,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
