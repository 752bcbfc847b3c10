//! Command-line front end: configuration, reports, plots and the
//! acceptance checks.

pub mod commands;
pub mod config;
pub mod error;
pub mod fd_oracle;
pub mod plot;
pub mod report;
pub mod verify;

pub use error::CliError;
