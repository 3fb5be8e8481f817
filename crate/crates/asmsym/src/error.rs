use std::path::PathBuf;

use asmsym_core::acg::AcgError;
use asmsym_core::assembly::AssemblyError;
use asmsym_core::atlas::AtlasError;
use asmsym_core::cayley::CayleyError;
use asmsym_core::egf::EgfError;
use asmsym_core::permgroup::GroupError;
use asmsym_core::treecount::TreeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Schema { field: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Egf(#[from] EgfError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Acg(#[from] AcgError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Encode(#[from] serde_json::Error),
}

/// Success.
pub const EXIT_OK: i32 = 0;
/// Input or validation error.
pub const EXIT_INVALID: i32 = 2;
/// A cap cut the output short; the output says so.
pub const EXIT_TRUNCATED: i32 = 3;
