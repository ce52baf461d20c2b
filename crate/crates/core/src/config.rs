//! Problem configuration: domain, operator order, weight and resolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one problem instance on the interval (-1, 1).
///
/// `crit_exp` is derived, never stored: 2*_s = 2N/(N - 2s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    /// Spatial dimension. Only N = 1 is supported by the interval basis.
    #[serde(default = "default_dim")]
    pub n: usize,
    /// Fractional order s of the operator, with N > 2s.
    pub s: f64,
    /// Weight exponent alpha >= 0 in |x|^alpha.
    #[serde(default)]
    pub alpha: f64,
    /// Eigenbasis truncation M >= 8.
    pub modes: usize,
    /// Physical sample count G >= 4 M (uniform transform grid).
    #[serde(default)]
    pub grid: usize,
}

fn default_dim() -> usize {
    1
}

impl ProblemConfig {
    /// Build and validate a configuration; `grid = 0` selects the 4M default.
    pub fn new(s: f64, alpha: f64, modes: usize, grid: usize) -> Result<Self> {
        let cfg = ProblemConfig {
            n: 1,
            s,
            alpha,
            modes,
            grid: if grid == 0 { 4 * modes } else { grid },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 1 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::InvalidConfig(format!("s must lie in (0,1), got {}", self.s)));
        }
        if (self.n as f64) <= 2.0 * self.s {
            return Err(Error::InvalidConfig(format!(
                "need N > 2s (N = {}, s = {}); the interval basis requires s < 1/2",
                self.n, self.s
            )));
        }
        if self.alpha < 0.0 {
            return Err(Error::InvalidConfig(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.modes < 8 {
            return Err(Error::InvalidConfig(format!("modes must be >= 8, got {}", self.modes)));
        }
        if self.grid < 4 * self.modes {
            return Err(Error::InvalidConfig(format!(
                "grid must be >= 4*modes = {}, got {}",
                4 * self.modes,
                self.grid
            )));
        }
        Ok(())
    }

    /// Critical Sobolev trace exponent 2*_s = 2N/(N - 2s).
    pub fn crit_exp(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0 * self.s)
    }

    /// Fill `grid` with the 4M default if unset, then validate.
    pub fn resolved(mut self) -> Result<Self> {
        if self.grid == 0 {
            self.grid = 4 * self.modes;
        }
        self.validate()?;
        Ok(self)
    }
}
