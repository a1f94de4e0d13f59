//! Batch harness for causal-set sampling experiments.
//!
//! A run is fully determined by its validated [`config::ExperimentConfig`]
//! and seed; every CSV it writes opens with a comment line recording the
//! config hash, seed and crate version.

pub mod config;
pub mod experiments;

use thiserror::Error;

pub use config::{validate_config, ExperimentConfig, RawConfig};
pub use experiments::{run_experiment, Report, WORKERS_ENV};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Io(_) | Self::Internal(_) => 1,
            Self::Resource(_) => 2,
            Self::Verification(_) => 3,
        }
    }
}

impl From<causet_core::Error> for CliError {
    fn from(e: causet_core::Error) -> Self {
        use causet_core::Error as E;
        match e {
            E::Usage(m) | E::Config(m) => Self::Validation(m),
            E::ResourceLimit(m) => Self::Resource(m),
            E::Verification(m) => Self::Verification(m),
            E::Internal(m) => Self::Internal(m),
        }
    }
}
