//! Command-line front end for the EPDM simulator: configuration parsing,
//! trajectory recording, benchmark sweeps and statistical validation
//! against the direct-method oracle.

pub mod bench;
pub mod config;
pub mod error;
pub mod simulate;
pub mod trajectory;
pub mod validate;

pub use bench::{run_bench, BenchReport, BenchRow, MeanRow};
pub use config::{parse_config, ConfigError, EngineChoice, RunConfig};
pub use error::CliError;
pub use simulate::{run_simulate, SimulationSummary, StopReason};
pub use validate::{run_validate, ValidateReport};

use std::path::Path;

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_config(&text)?)
}
