//! Run settings, from flags or a JSON file.

use std::num::{NonZeroU64, NonZeroUsize};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::schema::parse_json;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    pub waut: NonZeroUsize,
    pub candidates: NonZeroU64,
    pub chain_length: NonZeroUsize,
    pub zigzag_length: NonZeroUsize,
    pub leaves: NonZeroUsize,
    /// Paths kept per query; more are counted as truncation.
    pub paths: NonZeroUsize,
}

impl Default for Caps {
    fn default() -> Self {
        let nz = |n: usize| NonZeroUsize::new(n).expect("positive");
        Caps {
            waut: nz(asmsym_core::assembly::DEFAULT_WAUT_CAP),
            candidates: NonZeroU64::new(asmsym_core::acg::DEFAULT_CANDIDATE_CAP).expect("positive"),
            chain_length: nz(asmsym_core::atlas::MAX_CHAIN_LENGTH),
            zigzag_length: nz(4),
            leaves: nz(8),
            paths: nz(asmsym_core::atlas::DEFAULT_PATH_CAP),
        }
    }
}

/// Settings shared by every subcommand. Unknown keys are rejected and caps
/// must be positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<NonZeroUsize>,
    #[serde(default)]
    pub caps: Caps,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        parse_json(&text, path)
    }
}
