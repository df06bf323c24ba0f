//! Library side of the `zeta-moments` command: flag parsing, command
//! execution and report serialization.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{execute, ExitCode, Outcome};
pub use config::{Cli, RunConfig};
