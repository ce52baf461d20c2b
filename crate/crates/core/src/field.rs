//! Fields on the ball represented by eigenbasis coefficients.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::basis::{dot, BasisSpec};
use crate::error::{Error, Result};

/// A function u = sum_k u_k phi_k with a lazily cached physical trace.
#[derive(Debug, Default)]
pub struct SpectralField {
    coeffs: Vec<f64>,
    /// (basis id, samples on that basis' uniform grid)
    cache: OnceLock<(u64, Vec<f64>)>,
}

impl Clone for SpectralField {
    fn clone(&self) -> Self {
        // the cache is recomputable; cloning the coefficients is enough
        SpectralField {
            coeffs: self.coeffs.clone(),
            cache: OnceLock::new(),
        }
    }
}

impl SpectralField {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        SpectralField {
            coeffs,
            cache: OnceLock::new(),
        }
    }

    pub fn zeros(modes: usize) -> Self {
        Self::from_coeffs(vec![0.0; modes])
    }

    /// Unit coefficient on mode k (1-based), zero elsewhere.
    pub fn mode(k: usize, modes: usize) -> Self {
        let mut c = vec![0.0; modes];
        c[k - 1] = 1.0;
        Self::from_coeffs(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Pointwise evaluation sum_k u_k sin(k pi (x+1)/2) by recurrence.
    pub fn eval_at(&self, x: f64) -> f64 {
        let theta = PI * (x + 1.0) / 2.0;
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut acc = 0.0;
        for (i, &u) in self.coeffs.iter().enumerate() {
            if i > 0 {
                let sn = s * c1 + c * s1;
                let cn = c * c1 - s * s1;
                s = sn;
                c = cn;
            }
            acc += u * s;
        }
        acc
    }

    pub fn scaled(&self, t: f64) -> SpectralField {
        SpectralField::from_coeffs(self.coeffs.iter().map(|c| c * t).collect())
    }

    /// self + t * other
    pub fn axpy(&self, t: f64, other: &SpectralField) -> SpectralField {
        assert_eq!(self.len(), other.len());
        SpectralField::from_coeffs(
            self.coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a + t * b)
                .collect(),
        )
    }

    pub fn l2_norm(&self) -> f64 {
        dot(&self.coeffs, &self.coeffs).sqrt()
    }
}

/// Samples of the field on the basis' uniform grid (cached per basis).
pub fn to_physical<'a>(field: &'a SpectralField, basis: &BasisSpec) -> Result<&'a [f64]> {
    check_len(field, basis)?;
    let (id, samples) = field
        .cache
        .get_or_init(|| (basis.id, basis.synth_grid(&field.coeffs)));
    if *id == basis.id {
        Ok(samples)
    } else {
        // a different basis was passed than the one cached: the cache slot
        // is taken, so the caller gets a fresh uncached synthesis
        Err(Error::DimensionMismatch {
            expected: *id as usize,
            got: basis.id as usize,
        })
    }
}

/// Analysis of grid samples: u_k = h sum_i f_i phi_k(x_i). Adjoint of
/// [`to_physical`] with respect to the grid inner product.
pub fn to_coefficients(samples: &[f64], basis: &BasisSpec) -> Result<SpectralField> {
    if samples.len() != basis.grid.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.grid.len(),
            got: samples.len(),
        });
    }
    let h = basis.grid_weight;
    let coeffs: Vec<f64> = (1..=basis.modes)
        .map(|k| h * dot(basis.mode_row_grid(k), samples))
        .collect();
    Ok(SpectralField::from_coeffs(coeffs))
}

/// Spectral fractional Laplacian: coefficient-wise multiplication by lambda_k^s.
pub fn frac_laplacian(field: &SpectralField, s: f64, basis: &BasisSpec) -> Result<SpectralField> {
    check_len(field, basis)?;
    let coeffs = field
        .coeffs
        .iter()
        .zip(basis.eigenvalues.iter())
        .map(|(u, l)| u * l.powf(s))
        .collect();
    Ok(SpectralField::from_coeffs(coeffs))
}

/// H^s_0 norm (sum_k u_k^2 lambda_k^s)^{1/2}.
pub fn hs_norm(field: &SpectralField, s: f64, basis: &BasisSpec) -> Result<f64> {
    check_len(field, basis)?;
    Ok(hs_norm_sq(field, s, basis)?.sqrt())
}

pub fn hs_norm_sq(field: &SpectralField, s: f64, basis: &BasisSpec) -> Result<f64> {
    check_len(field, basis)?;
    Ok(field
        .coeffs
        .iter()
        .zip(basis.eigenvalues.iter())
        .map(|(u, l)| u * u * l.powf(s))
        .sum())
}

/// Fraction of H^s energy carried by the top 10% of modes; reported by the
/// nonlinear pipeline as the dealiasing health indicator.
pub fn tail_energy_fraction(field: &SpectralField, s: f64, basis: &BasisSpec) -> Result<f64> {
    check_len(field, basis)?;
    let m = field.len();
    let cut = m - m / 10;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (i, (u, l)) in field.coeffs.iter().zip(basis.eigenvalues.iter()).enumerate() {
        let e = u * u * l.powf(s);
        total += e;
        if i >= cut {
            tail += e;
        }
    }
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(tail / total)
}

fn check_len(field: &SpectralField, basis: &BasisSpec) -> Result<()> {
    if field.len() != basis.modes {
        return Err(Error::DimensionMismatch {
            expected: basis.modes,
            got: field.len(),
        });
    }
    Ok(())
}
