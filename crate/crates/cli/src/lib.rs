//! Command-line front end: file encryption and the reduction experiments.

pub mod args;
pub mod commands;
pub mod config;
pub mod container;
pub mod error;

pub use error::CliError;
