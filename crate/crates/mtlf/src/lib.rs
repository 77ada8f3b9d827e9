//! File formats, configuration, report writers and the command-line front end for
//! `mtlf-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod report;

pub use error::{CliError, ExitKind};
