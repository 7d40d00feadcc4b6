//! Library side of the `mvrp` command: configuration, the solve/bench
//! pipeline, report types and SVG plotting. The binary in `main.rs` is a
//! thin argument-parsing layer over these modules.

use std::fmt;

pub mod config;
pub mod pipeline;
pub mod plot;
pub mod report;

/// Errors split by exit code: usage problems exit 1, runtime failures 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mvrp_core::Error> for CliError {
    fn from(e: mvrp_core::Error) -> Self {
        match e {
            mvrp_core::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}
