//! Dirichlet eigenbasis of the interval (-1, 1).
//!
//! phi_k(x) = sin(k pi (x+1)/2) with eigenvalue lambda_k = (k pi / 2)^2 and
//! ||phi_k||_{L^2} = 1. The transform grid is the uniform interior grid on
//! which the sines are *exactly* discretely orthonormal, so synthesis and
//! analysis invert each other to machine precision on band-limited fields.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::config::ProblemConfig;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

static BASIS_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
pub struct BasisSpec {
    /// Cache key for fields carrying sample caches.
    pub(crate) id: u64,
    /// Number of retained modes M.
    pub modes: usize,
    /// Dirichlet eigenvalues lambda_k = (k pi / 2)^2, k = 1..=M.
    pub eigenvalues: Vec<f64>,
    /// Uniform interior grid x_i = -1 + i h, i = 1..=G, h = 2/(G+1).
    pub grid: Vec<f64>,
    /// Grid quadrature weight h (trapezoid on interior points).
    pub grid_weight: f64,
    /// Split graded Gauss rule for weighted and nonlinear integrals.
    pub quad: QuadratureRule,
    /// sine_grid[k-1][i] = phi_k(grid[i])
    sine_grid: Vec<Vec<f64>>,
    /// sine_quad[k-1][i] = phi_k(quad.nodes[i])
    sine_quad: Vec<Vec<f64>>,
}

/// Build the basis for a validated configuration. Rejects N != 1.
pub fn make_basis(config: &ProblemConfig) -> Result<BasisSpec> {
    config.validate()?;
    if config.n != 1 {
        return Err(Error::UnsupportedDimension(config.n));
    }
    Ok(BasisSpec::new(config.modes, config.grid))
}

impl BasisSpec {
    /// Basis with M modes and a G-point uniform transform grid.
    pub fn new(modes: usize, grid_points: usize) -> Self {
        assert!(modes >= 1 && grid_points > modes);
        let eigenvalues: Vec<f64> = (1..=modes)
            .map(|k| (k as f64 * PI / 2.0).powi(2))
            .collect();
        let h = 2.0 / (grid_points as f64 + 1.0);
        let grid: Vec<f64> = (1..=grid_points).map(|i| -1.0 + i as f64 * h).collect();
        let quad = QuadratureRule::for_modes(modes);
        let sine_grid = sine_table(modes, &grid);
        let sine_quad = sine_table(modes, &quad.nodes);
        BasisSpec {
            id: BASIS_ID.fetch_add(1, Ordering::Relaxed),
            modes,
            eigenvalues,
            grid,
            grid_weight: h,
            quad,
            sine_grid,
            sine_quad,
        }
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k - 1]
    }

    /// phi_k evaluated anywhere (1-based k).
    pub fn phi(&self, k: usize, x: f64) -> f64 {
        (k as f64 * PI * (x + 1.0) / 2.0).sin()
    }

    pub(crate) fn mode_row_grid(&self, k: usize) -> &[f64] {
        &self.sine_grid[k - 1]
    }

    /// Synthesize coefficients at the quadrature nodes.
    pub fn synth_quad(&self, coeffs: &[f64]) -> Vec<f64> {
        synth(coeffs, &self.sine_quad, self.quad.len())
    }

    /// Synthesize coefficients on the uniform grid.
    pub fn synth_grid(&self, coeffs: &[f64]) -> Vec<f64> {
        synth(coeffs, &self.sine_grid, self.grid.len())
    }

    /// Project values at the quadrature nodes onto the basis:
    /// out_k = sum_i w_i values_i phi_k(x_i).
    pub fn project_quad(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.quad.len());
        let weighted: Vec<f64> = values
            .iter()
            .zip(self.quad.weights.iter())
            .map(|(v, w)| v * w)
            .collect();
        self.sine_quad
            .iter()
            .map(|row| dot(row, &weighted))
            .collect()
    }
}

fn sine_table(modes: usize, points: &[f64]) -> Vec<Vec<f64>> {
    // sin(k theta) by the angle-addition recurrence per point
    let mut table = vec![vec![0.0; points.len()]; modes];
    for (i, &x) in points.iter().enumerate() {
        let theta = PI * (x + 1.0) / 2.0;
        let (s1, c1) = theta.sin_cos();
        let mut s = s1;
        let mut c = c1;
        table[0][i] = s;
        for row in table.iter_mut().skip(1) {
            let sn = s * c1 + c * s1;
            let cn = c * c1 - s * s1;
            s = sn;
            c = cn;
            row[i] = s;
        }
    }
    table
}

fn synth(coeffs: &[f64], table: &[Vec<f64>], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (c, row) in coeffs.iter().zip(table.iter()) {
        if *c != 0.0 {
            for (o, t) in out.iter_mut().zip(row.iter()) {
                *o += c * t;
            }
        }
    }
    out
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
