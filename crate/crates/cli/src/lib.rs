//! Front end for `jtd-core`: config files, sweeps, CSV output and figure data.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use commands::{run, Outcome};
pub use error::{CliError, CliResult};
