//! IO layer and command implementations for the `geist` binary: raw season
//! CSV ingestion, the canonical dataset file and the analysis subcommands.

pub mod commands;
pub mod error;
pub mod ingest;
pub mod store;

pub use error::CliError;
