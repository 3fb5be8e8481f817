//! File formats, reports and the command-line front end for `asmsym-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod schema;

pub use error::Error;
