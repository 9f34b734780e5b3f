//! Run configuration shared by every command and echoed into its output.

use serde::{Deserialize, Serialize};
use viscount_core::cutting::CuttingParams;
use viscount_core::index::IndexOptions;
use viscount_core::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    Alpha(String),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("cannot parse `{0}` as a rational number")]
    Number(String),
}

/// Exact rationals as `"n/d"` strings.
pub mod ratio {
    use serde::{Deserialize, Deserializer, Serializer};
    use viscount_core::Scalar;

    pub fn serialize<S: Serializer>(v: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_ratio_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| serde::de::Error::custom(format!("invalid rational `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(with = "ratio")]
    pub alpha: Scalar,
    pub crossing_bound_constant: f64,
    pub cell_bound_constant: f64,
    pub max_retries: u32,
    /// Every this many cells of the index build is checked against the oracle.
    pub verify_every: usize,
    /// Points sampled by the cover check; zero skips it.
    pub cover_samples: usize,
    /// Record wall-clock times. Off by default so reports are reproducible.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = CuttingParams::new(Scalar::from_ratio(1, 2));
        RunConfig {
            seed: 0,
            alpha: c.alpha,
            crossing_bound_constant: c.crossing_bound_constant,
            cell_bound_constant: c.cell_bound_constant,
            max_retries: c.max_retries,
            verify_every: IndexOptions::new(0).verify_every,
            cover_samples: 0,
            timing: false,
        }
    }
}

pub fn parse_alpha(s: &str) -> Result<Scalar, ConfigError> {
    s.parse().map_err(|_| ConfigError::Number(s.to_owned()))
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.alpha <= Scalar::zero() || self.alpha >= Scalar::one() {
            return Err(ConfigError::Alpha(self.alpha.to_string()));
        }
        if self.crossing_bound_constant.is_nan() || self.crossing_bound_constant <= 0.0 {
            return Err(ConfigError::NotPositive("crossing_bound_constant"));
        }
        if self.cell_bound_constant.is_nan() || self.cell_bound_constant <= 0.0 {
            return Err(ConfigError::NotPositive("cell_bound_constant"));
        }
        if self.max_retries == 0 {
            return Err(ConfigError::NotPositive("max_retries"));
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: Scalar) -> Self {
        RunConfig { alpha, ..self.clone() }
    }

    pub fn cutting_params(&self) -> CuttingParams {
        CuttingParams {
            alpha: self.alpha.clone(),
            crossing_bound_constant: self.crossing_bound_constant,
            cell_bound_constant: self.cell_bound_constant,
            max_retries: self.max_retries,
        }
    }

    pub fn index_options(&self) -> IndexOptions {
        IndexOptions { seed: self.seed, verify_every: self.verify_every }
    }
}
