use serde::{Deserialize, Serialize};

use crate::chatelet::DEFAULT_SCAN_BOUND;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Scales `j` in `x = p^j t` run over `[-depth, depth]`.
    pub depth: u32,
    pub scan_bound: u64,
    /// Profiles cover every prime up to this bound.
    pub prime_bound: u64,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Self { depth: 4, scan_bound: DEFAULT_SCAN_BOUND, prime_bound: 200, format: Format::Json }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 || self.scan_bound == 0 || self.prime_bound == 0 {
            return Err(Error::Precondition("depth and bounds must be positive".into()));
        }
        Ok(())
    }
}
