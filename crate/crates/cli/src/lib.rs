//! Command implementations for the `symtop` binary.

pub mod check;
pub mod commands;
pub mod config;
mod error;

pub use error::CliError;
