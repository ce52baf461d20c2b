//! Weighted Henon functionals on the trace side.
//!
//! All quotients are computed with H^s norms in place of the cylinder
//! energy; the extension module validates that identification separately.
//! Fractional powers are always applied to absolute values, so every
//! functional here is total on sign-changing fields.

use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::field::{hs_norm_sq, SpectralField};

/// Exponent pair of the system nonlinearity |x|^alpha |u|^p |v|^q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentConfig {
    pub p: f64,
    pub q: f64,
}

/// Position of p+q relative to the critical exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

impl ExponentConfig {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 1.0 && q > 1.0) {
            return Err(Error::NonIntegrablePower { p, q });
        }
        Ok(ExponentConfig { p, q })
    }

    pub fn sum(&self) -> f64 {
        self.p + self.q
    }

    pub fn cpq(&self) -> f64 {
        cpq(self.p, self.q)
    }

    pub fn criticality(&self, crit_exp: f64) -> Criticality {
        let s = self.sum();
        if s < crit_exp - 1e-12 {
            Criticality::Subcritical
        } else if s > crit_exp + 1e-12 {
            Criticality::Supercritical
        } else {
            Criticality::Critical
        }
    }
}

/// Coupling constant C_{p,q} = (p/q)^{q/(p+q)} + (p/q)^{-p/(p+q)}.
///
/// This is the minimum of x^q + x^{-p} over x > 0, so it is symmetric in
/// (p, q) and bounded above by its p = q value: 0 < C_{p,q} <= 2 with
/// equality iff p = q.
pub fn cpq(p: f64, q: f64) -> f64 {
    assert!(p > 0.0 && q > 0.0, "cpq needs positive exponents");
    let r = p / q;
    let s = p + q;
    r.powf(q / s) + r.powf(-p / s)
}

/// Quadrature weights w_i |x_i|^alpha at the rule nodes.
pub fn henon_weights(alpha: f64, basis: &BasisSpec) -> Vec<f64> {
    basis
        .quad
        .nodes
        .iter()
        .zip(basis.quad.weights.iter())
        .map(|(&x, &w)| w * x.abs().powf(alpha))
        .collect()
}

/// |x_i|^alpha alone (used when the quadrature weight is applied later).
pub(crate) fn henon_factor(alpha: f64, basis: &BasisSpec) -> Vec<f64> {
    basis.quad.nodes.iter().map(|&x| x.abs().powf(alpha)).collect()
}

/// Mixed nonlinear integral from samples at the quadrature nodes.
pub(crate) fn mixed_term_samples(us: &[f64], vs: &[f64], p: f64, q: f64, hw: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((&u, &v), &w) in us.iter().zip(vs.iter()).zip(hw.iter()) {
        acc += w * u.abs().powf(p) * v.abs().powf(q);
    }
    acc
}

pub(crate) fn scalar_term_samples(ws: &[f64], r: f64, hw: &[f64]) -> f64 {
    ws.iter().zip(hw.iter()).map(|(&u, &w)| w * u.abs().powf(r)).sum()
}

/// int_B |x|^alpha |u|^p |v|^q dx by the split graded quadrature.
pub fn mixed_term(
    u: &SpectralField,
    v: &SpectralField,
    exp: &ExponentConfig,
    alpha: f64,
    basis: &BasisSpec,
) -> Result<f64> {
    check(u, basis)?;
    check(v, basis)?;
    let us = basis.synth_quad(u.coeffs());
    let vs = basis.synth_quad(v.coeffs());
    Ok(mixed_term_samples(&us, &vs, exp.p, exp.q, &henon_weights(alpha, basis)))
}

/// int_B |x|^alpha |w|^r dx.
pub fn scalar_term(w: &SpectralField, r: f64, alpha: f64, basis: &BasisSpec) -> Result<f64> {
    check(w, basis)?;
    let ws = basis.synth_quad(w.coeffs());
    Ok(scalar_term_samples(&ws, r, &henon_weights(alpha, basis)))
}

const DENOMINATOR_FLOOR: f64 = 1e-300;

/// System Rayleigh quotient
/// (||u||^2 + ||v||^2) / (int |x|^alpha |u|^p |v|^q)^{2/(p+q)}.
pub fn quotient_system(
    u: &SpectralField,
    v: &SpectralField,
    exp: &ExponentConfig,
    alpha: f64,
    s: f64,
    basis: &BasisSpec,
) -> Result<f64> {
    let t = mixed_term(u, v, exp, alpha, basis)?;
    if t <= DENOMINATOR_FLOOR {
        return Err(Error::ZeroDenominator(t));
    }
    let num = hs_norm_sq(u, s, basis)? + hs_norm_sq(v, s, basis)?;
    Ok(num / t.powf(2.0 / exp.sum()))
}

/// Scalar Rayleigh quotient ||w||^2 / (int |x|^alpha |w|^r)^{2/r}.
pub fn quotient_scalar(
    w: &SpectralField,
    r: f64,
    alpha: f64,
    s: f64,
    basis: &BasisSpec,
) -> Result<f64> {
    let t = scalar_term(w, r, alpha, basis)?;
    if t <= DENOMINATOR_FLOOR {
        return Err(Error::ZeroDenominator(t));
    }
    Ok(hs_norm_sq(w, s, basis)? / t.powf(2.0 / r))
}

/// Energy functional I(u,v) = 1/2 (||u||^2 + ||v||^2) - 2/(p+q) T(u,v)
/// whose critical points are the weak solutions of the system.
pub fn functional_value(
    u: &SpectralField,
    v: &SpectralField,
    exp: &ExponentConfig,
    alpha: f64,
    s: f64,
    basis: &BasisSpec,
) -> Result<f64> {
    let t = mixed_term(u, v, exp, alpha, basis)?;
    let e = hs_norm_sq(u, s, basis)? + hs_norm_sq(v, s, basis)?;
    Ok(0.5 * e - 2.0 / exp.sum() * t)
}

/// Coefficient-space gradient of I: the weak residual direction
/// ((-Delta)^s u - 2p/(p+q) |x|^a |u|^{p-1}|v|^q sgn u, ...).
pub fn gradient_pair(
    u: &SpectralField,
    v: &SpectralField,
    exp: &ExponentConfig,
    alpha: f64,
    s: f64,
    basis: &BasisSpec,
) -> Result<(SpectralField, SpectralField)> {
    if exp.p < 1.0 || exp.q < 1.0 {
        return Err(Error::NonIntegrablePower { p: exp.p, q: exp.q });
    }
    check(u, basis)?;
    check(v, basis)?;
    let us = basis.synth_quad(u.coeffs());
    let vs = basis.synth_quad(v.coeffs());
    let xa = henon_factor(alpha, basis);
    let (tg_u, tg_v) = t_gradient_samples(&us, &vs, exp.p, exp.q, &xa);
    let pu = basis.project_quad(&tg_u);
    let pv = basis.project_quad(&tg_v);
    let w = 2.0 / exp.sum();
    let gu: Vec<f64> = u
        .coeffs()
        .iter()
        .zip(basis.eigenvalues.iter())
        .zip(pu.iter())
        .map(|((c, l), g)| c * l.powf(s) - w * g)
        .collect();
    let gv: Vec<f64> = v
        .coeffs()
        .iter()
        .zip(basis.eigenvalues.iter())
        .zip(pv.iter())
        .map(|((c, l), g)| c * l.powf(s) - w * g)
        .collect();
    Ok((SpectralField::from_coeffs(gu), SpectralField::from_coeffs(gv)))
}

/// Node values of (dT/du, dT/dv) with the |x|^alpha factor folded in but the
/// quadrature weight left for the projection.
pub(crate) fn t_gradient_samples(
    us: &[f64],
    vs: &[f64],
    p: f64,
    q: f64,
    xa: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = us.len();
    let mut gu = vec![0.0; n];
    let mut gv = vec![0.0; n];
    for i in 0..n {
        let au = us[i].abs();
        let av = vs[i].abs();
        let pu = au.powf(p - 1.0);
        let pv = av.powf(q - 1.0);
        gu[i] = xa[i] * p * us[i].signum() * pu * (pv * av);
        gv[i] = xa[i] * q * vs[i].signum() * (pu * au) * pv;
    }
    (gu, gv)
}

pub(crate) fn t_gradient_scalar_samples(ws: &[f64], r: f64, xa: &[f64]) -> Vec<f64> {
    ws.iter()
        .zip(xa.iter())
        .map(|(&u, &a)| a * r * u.signum() * u.abs().powf(r - 1.0))
        .collect()
}

fn check(f: &SpectralField, basis: &BasisSpec) -> Result<()> {
    if f.len() != basis.modes {
        return Err(Error::DimensionMismatch {
            expected: basis.modes,
            got: f.len(),
        });
    }
    Ok(())
}
