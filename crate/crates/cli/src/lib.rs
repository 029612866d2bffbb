//! Command-line front end of crowdlens: argument parsing, configuration
//! layering, file-based subcommands and the playback server.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod server;

pub use args::{run, Cli};
pub use error::CliError;
