//! Batch front end for the `uplink-access` engine: configuration and
//! argument parsing, the `analyze` / `simulate` / `bounds` / `validate`
//! subcommands, and the acceptance criteria behind `validate`.

pub mod commands;
pub mod error;
pub mod parse;
pub mod validation;

pub use commands::{run, Command, LevelArg, ModeArg, Output, RunManifest};
pub use error::{CliError, CliResult};
