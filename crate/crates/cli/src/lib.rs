//! Command-line front end for `spectral-series`: data generation, tuning,
//! prediction, embedding export, benchmark suites and model persistence.

pub mod archive;
pub mod commands;
pub mod error;
pub mod experiments;
pub mod output;

pub use archive::{ModelArchive, Preprocessing};
pub use error::{CliError, Result};
