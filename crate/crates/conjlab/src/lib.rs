//! Command-line companion to `conjlab-core`: map loading, seeded sampling,
//! the property suite, deterministic CSV/JSON reports and the subcommands
//! of the `conjlab` binary.

// `CliError` wraps the core error, which carries exact rationals.
#![allow(clippy::result_large_err)]

pub mod cli;
pub mod commands;
pub mod error;
pub mod maps;
pub mod random;
pub mod report;
pub mod verify;

pub use commands::Limits;
pub use error::{CliError, ExitStatus};
pub use report::{Format, Report};
