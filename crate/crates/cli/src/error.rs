use std::io;
use std::path::PathBuf;

use epdm_core::dm::OracleError;
use epdm_core::EngineError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("engine: {0}")]
    Engine(#[from] EngineError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("structure check failed after {reactions} reactions: {detail}")]
    Structure { reactions: u64, detail: String },
    #[error("validation failed: {0}")]
    ValidationFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit status: 1 I/O, 2 configuration, 3 engine, 4 failed validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Engine(_) | CliError::Oracle(_) | CliError::Structure { .. } => 3,
            CliError::ValidationFailed(_) => 4,
        }
    }
}
