//! Front end for carlitz-core: tables of Carlitz quantities, verification
//! suites, solvers driven by JSON files, and the series exchange format.

pub mod config;
pub mod error;
pub mod format;
pub mod parse;
pub mod solve;
pub mod tables;
pub mod verify;

pub use config::{OutputFormat, RunConfig};
pub use error::{CliError, Result};
