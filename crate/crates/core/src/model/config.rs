//! Plain-text model configuration: `key = value` lines, `#` comments.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{cosine_crystal, Interval, TwoBandModel, DEFAULT_SECTOR_THETA0};
use crate::error::{Error, Result};

/// Parameters of the cosine-crystal family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub i0: Interval,
    pub i1: Interval,
    pub nu: f64,
    pub g0: f64,
    pub eps: f64,
    pub theta0: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            i0: Interval { lo: 0.0, hi: 1.0 },
            i1: Interval { lo: 2.0, hi: 3.0 },
            nu: 0.0,
            g0: 1.0,
            eps: 0.0,
            theta0: DEFAULT_SECTOR_THETA0,
        }
    }
}

impl ModelConfig {
    /// Parses config text; keys not given keep their default values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Config(format!(
                    "line {}: `{}` is not a number",
                    lineno + 1,
                    value.trim()
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::Config(format!(
                    "line {}: `{key}` must be finite",
                    lineno + 1
                )));
            }
            match key {
                "i0.lo" => cfg.i0.lo = value,
                "i0.hi" => cfg.i0.hi = value,
                "i1.lo" => cfg.i1.lo = value,
                "i1.hi" => cfg.i1.hi = value,
                "nu" => cfg.nu = value,
                "g0" => cfg.g0 = value,
                "eps" => cfg.eps = value,
                "theta0" => cfg.theta0 = value,
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn build(&self) -> Result<TwoBandModel> {
        let i0 = Interval::new(self.i0.lo, self.i0.hi)?;
        let i1 = Interval::new(self.i1.lo, self.i1.hi)?;
        cosine_crystal(i0, i1, self.nu, self.g0, self.eps, self.theta0)
    }
}
