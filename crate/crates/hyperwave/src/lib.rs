//! File formats and command-line front end for `hyperwave-core`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod format;

pub use commands::{execute, run, CliError, Output, Report};
pub use config::{Cli, Command, RunConfig};
