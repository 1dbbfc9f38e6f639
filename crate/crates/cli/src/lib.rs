//! Command-line front end for the hull-relaxation solver: file formats,
//! SDPA import, graph parsing, the independent certificate checker, and a
//! synthetic benchmark generator.

pub mod bench;
pub mod check;
pub mod cli;
pub mod formats;
pub mod graphs;
pub mod sdpa;

use std::fmt;

/// Input or data problem (malformed file, invalid values, failed solve
/// preconditions). Maps to exit code 65.
#[derive(Debug)]
pub struct DataError(pub String);

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DataError {}

impl From<std::io::Error> for DataError {
    fn from(e: std::io::Error) -> Self {
        DataError(format!("i/o: {e}"))
    }
}

impl From<chrsolve_core::Error> for DataError {
    fn from(e: chrsolve_core::Error) -> Self {
        DataError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, DataError>;
