//! Pipeline commands and the read-only query service behind the `energykg` binary.

pub mod commands;
pub mod config;
pub mod service;

use energykg_core::analysis::StudyError;
use energykg_core::query::QueryError;
use energykg_core::rdf::NTriplesError;
use energykg_core::uplift::UpliftError;
use thiserror::Error;

pub use config::{PipelineConfig, CONFIG_ENV};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("query error: {0}")]
    Query(String),
    #[error("startup error: {0}")]
    Startup(String),
}

impl CliError {
    /// 0 success, 1 usage, 2 data, 3 query.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) | CliError::Startup(_) => 2,
            CliError::Query(_) => 3,
        }
    }
}

impl From<UpliftError> for CliError {
    fn from(e: UpliftError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        CliError::Query(e.to_string())
    }
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Query(q) => q.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl CliError {
    pub(crate) fn ntriples(path: &std::path::Path, e: NTriplesError) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }
}
