//! File formats and subcommands for the `rdregion` tool: JSON model files
//! in, CSV frontiers and JSON reports out.

pub mod commands;
pub mod error;
pub mod model;
pub mod num;
pub mod report;

pub use error::{CliError, Result};
