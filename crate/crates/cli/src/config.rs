//! The run configuration document: one JSON object per run.
//!
//! Required keys: `s` and `modes`. Everything else has documented defaults
//! (see `henon --help`). The resolved form (all defaults filled) is
//! embedded in the manifest and reproduces the run when fed back in.

use serde::{Deserialize, Serialize};

use henon_core::config::ProblemConfig;
use henon_core::error::Error as CoreError;
use henon_core::solver::SolverOptions;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Fractional order s in (0, 1/2) for solves (N = 1 requires N > 2s);
    /// extension checks accept the full (0, 1).
    pub s: f64,
    /// Henon weight exponent alpha >= 0.
    #[serde(default)]
    pub alpha: f64,
    /// Eigenbasis truncation M >= 8.
    pub modes: usize,
    /// Physical grid count (0 or absent selects the 4M default).
    #[serde(default)]
    pub grid: usize,
    /// System exponent p (solve / identity commands).
    #[serde(default)]
    pub p: Option<f64>,
    /// System exponent q (solve / identity commands).
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub bubble: Option<BubbleSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub max_iters: usize,
    pub tol_grad: f64,
    pub tol_quotient: f64,
    pub step_init: f64,
    pub backtrack: f64,
    pub bump_center: f64,
    pub bump_width: f64,
    pub positivity: bool,
    pub critical_mode: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverSection {
            max_iters: o.max_iters,
            tol_grad: o.tol_grad,
            tol_quotient: o.tol_quotient,
            step_init: o.step_init,
            backtrack: o.backtrack,
            bump_center: o.bump_center,
            bump_width: o.bump_width,
            positivity: o.positivity,
            critical_mode: o.critical_mode,
        }
    }
}

impl SolverSection {
    pub fn to_options(&self) -> SolverOptions {
        SolverOptions {
            max_iters: self.max_iters,
            tol_grad: self.tol_grad,
            tol_quotient: self.tol_quotient,
            step_init: self.step_init,
            backtrack: self.backtrack,
            bump_center: self.bump_center,
            bump_width: self.bump_width,
            positivity: self.positivity,
            critical_mode: self.critical_mode,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub q: f64,
    pub p_list: Vec<f64>,
    #[serde(default = "default_true")]
    pub warm_start: bool,
    #[serde(default = "default_gap")]
    pub near_critical_gap: f64,
    #[serde(default = "default_factor")]
    pub near_critical_iter_factor: f64,
}

fn default_true() -> bool {
    true
}
fn default_gap() -> f64 {
    0.2
}
fn default_factor() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BubbleSection {
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    #[serde(default = "default_halvings")]
    pub halvings: usize,
}

fn default_eps0() -> f64 {
    0.05
}
fn default_halvings() -> usize {
    7
}

impl Default for BubbleSection {
    fn default() -> Self {
        BubbleSection {
            eps0: default_eps0(),
            halvings: default_halvings(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        if cfg.grid == 0 {
            cfg.grid = 4 * cfg.modes;
        }
        Ok(cfg)
    }

    pub fn problem(&self) -> Result<ProblemConfig, CoreError> {
        ProblemConfig {
            n: 1,
            s: self.s,
            alpha: self.alpha,
            modes: self.modes,
            grid: self.grid,
        }
        .resolved()
    }
}
