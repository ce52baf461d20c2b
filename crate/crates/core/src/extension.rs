//! The harmonic extension to the half-cylinder, realized per eigenmode.
//!
//! Separation of variables turns the degenerate extension equation into the
//! universal radial profile theta_s: the extension of a single mode phi_k is
//! phi_k(x) theta(sqrt(lambda_k) y), where
//!
//! ```text
//! theta'' + (1-2s)/z theta' - theta = 0,  theta(0) = 1, theta(inf) = 0,
//! ```
//!
//! solved by theta(z) = (2^{1-s}/Gamma(s)) z^s K_s(z). This keeps the x
//! direction exact and reduces the y direction to a one-dimensional special
//! function, which is where the operator identities live; a naive mesh in y
//! loses the weighted Neumann limit at the degenerate edge.
//!
//! Constants. The energy that makes the extension an isometry with the H^s
//! norm is (1/k_s) int y^{1-2s} |grad w|^2 with k_s = 2^{1-2s} Gamma(1-s) /
//! Gamma(s): with theta(0) = 1 forced by the trace condition, the profile
//! integral int z^{1-2s} (theta^2 + theta'^2) dz equals k_s itself, so the
//! reciprocal is the unique prefactor giving ||E_s u|| = ||u||_{H^s}. The
//! same reciprocal recovers (-Delta)^s u from the weighted Neumann trace.

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::quadrature::gauss_legendre;
use crate::special::{bessel_k, gamma};

/// k_s = 2^{1-2s} Gamma(1-s) / Gamma(s).
pub fn ks_constant(s: f64) -> f64 {
    assert!(s > 0.0 && s < 1.0, "ks_constant needs s in (0,1)");
    2f64.powf(1.0 - 2.0 * s) * gamma(1.0 - s) / gamma(s)
}

/// The energy/Neumann normalization 1/k_s (= 2^{2s-1} Gamma(s)/Gamma(1-s)).
pub fn energy_constant(s: f64) -> f64 {
    1.0 / ks_constant(s)
}

/// Tabulated universal extension profile for one value of s.
#[derive(Debug, Clone)]
pub struct ExtensionProfile {
    pub s: f64,
    pub ks: f64,
    /// Geometric z grid on [1e-6, 40].
    z_grid: Vec<f64>,
    /// e^z theta(z): a power law at both ends of the table, so cubic
    /// interpolation in ln z is uniformly accurate; the e^{-z} factor is
    /// restored on evaluation.
    theta_scaled: Vec<f64>,
    theta_prime_scaled: Vec<f64>,
    /// int_0^inf z^{1-2s} (theta^2 + theta'^2) dz; equals k_s analytically.
    pub norm_integral: f64,
    ln_z0: f64,
    ln_step: f64,
}

pub const Z_MIN: f64 = 1e-6;
pub const Z_MAX: f64 = 40.0;
const TABLE_LEN: usize = 1280;

/// theta(z) by fresh quadrature (no table).
pub fn theta_exact(s: f64, z: f64) -> Result<f64> {
    Ok(2f64.powf(1.0 - s) / gamma(s) * z.powf(s) * bessel_k(s, z)?)
}

/// theta'(z) = -(2^{1-s}/Gamma(s)) z^s K_{1-s}(z), from d/dz [z^s K_s] =
/// -z^s K_{s-1} and K_{s-1} = K_{1-s}.
pub fn theta_prime_exact(s: f64, z: f64) -> Result<f64> {
    Ok(-(2f64.powf(1.0 - s) / gamma(s)) * z.powf(s) * bessel_k(1.0 - s, z)?)
}

/// Build the tabulated profile, its derivative and the normalization
/// integral for s in (0, 1).
pub fn theta_profile(s: f64) -> Result<ExtensionProfile> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidConfig(format!("s must lie in (0,1), got {s}")));
    }
    let ln_z0 = Z_MIN.ln();
    let ln_step = (Z_MAX / Z_MIN).ln() / (TABLE_LEN - 1) as f64;
    let mut z_grid = Vec::with_capacity(TABLE_LEN);
    let mut theta_scaled = Vec::with_capacity(TABLE_LEN);
    let mut theta_prime_scaled = Vec::with_capacity(TABLE_LEN);
    for i in 0..TABLE_LEN {
        let z = (ln_z0 + i as f64 * ln_step).exp();
        z_grid.push(z);
        theta_scaled.push(z.exp() * theta_exact(s, z)?);
        theta_prime_scaled.push(z.exp() * theta_prime_exact(s, z)?);
    }

    // normalization integral in log coordinates; the integrand decays like
    // e^{2 s u} toward u -> -inf and like e^{-2 e^u} upward
    let (gx, gw) = gauss_legendre(16);
    let u_lo = -130.0f64;
    let u_hi = 45f64.ln();
    let panels = (((u_hi - u_lo) / 0.75).ceil() as usize).max(8);
    let h = (u_hi - u_lo) / panels as f64;
    let mut acc = 0.0;
    for j in 0..panels {
        let c = u_lo + (j as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(gw.iter()) {
            let u = c + 0.5 * h * x;
            let z = u.exp();
            let th = theta_exact(s, z)?;
            let dth = theta_prime_exact(s, z)?;
            acc += w * (th * th + dth * dth) * z.powf(2.0 - 2.0 * s);
        }
    }
    acc *= 0.5 * h;

    Ok(ExtensionProfile {
        s,
        ks: ks_constant(s),
        z_grid,
        theta_scaled,
        theta_prime_scaled,
        norm_integral: acc,
        ln_z0,
        ln_step,
    })
}

impl ExtensionProfile {
    pub fn z_grid(&self) -> &[f64] {
        &self.z_grid
    }

    /// theta at the table nodes.
    pub fn theta_table(&self) -> Vec<f64> {
        self.z_grid
            .iter()
            .zip(self.theta_scaled.iter())
            .map(|(&z, &t)| (-z).exp() * t)
            .collect()
    }

    /// theta(z) by 4-point Lagrange interpolation in ln z. Below the table
    /// the profile follows its 1 + c z^{2s} behavior; above it, zero.
    pub fn theta(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        if z < Z_MIN {
            let t0 = (-Z_MIN).exp() * self.theta_scaled[0];
            return 1.0 + (t0 - 1.0) * (z / Z_MIN).powf(2.0 * self.s);
        }
        if z >= Z_MAX {
            return 0.0;
        }
        (-z).exp() * self.interp(&self.theta_scaled, z)
    }

    /// theta'(z), interpolated; below the table it follows -k_s z^{2s-1}.
    pub fn theta_prime(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if z < Z_MIN {
            let d0 = (-Z_MIN).exp() * self.theta_prime_scaled[0];
            return d0 * (z / Z_MIN).powf(2.0 * self.s - 1.0);
        }
        if z >= Z_MAX {
            return 0.0;
        }
        (-z).exp() * self.interp(&self.theta_prime_scaled, z)
    }

    fn interp(&self, table: &[f64], z: f64) -> f64 {
        let u = (z.ln() - self.ln_z0) / self.ln_step;
        let i = (u.floor() as usize).clamp(1, TABLE_LEN - 3);
        let t = u - i as f64;
        // cubic Lagrange on the four surrounding log-equispaced nodes
        let (m1, p0, p1, p2) = (table[i - 1], table[i], table[i + 1], table[i + 2]);
        let c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        c0 * m1 + c1 * p0 + c2 * p1 + c3 * p2
    }

    /// Residual of theta'' + (1-2s)/z theta' - theta at z, by fourth-order
    /// central differences of the fresh (table-free) profile in the log
    /// variable u = ln z, where the residual reads
    /// e^{-2u}(theta_uu - 2s theta_u) - theta and the derivatives stay
    /// tame near the z^{2s} cusp. All five stencil evaluations share one
    /// quadrature grid so their errors cancel in the differences.
    pub fn ode_residual(&self, z: f64) -> Result<f64> {
        let s = self.s;
        let u0 = z.ln();
        let h = 1e-2;
        // extra panel density: the residual differences amplify the Bessel
        // quadrature error by 1/(z h)^2
        let (t_max, panels) = crate::special::bessel_grid(s, z);
        let panels = panels * 8;
        let factor = 2f64.powf(1.0 - s) / gamma(s);
        let th = |u: f64| {
            let zz = u.exp();
            factor * zz.powf(s) * crate::special::bessel_k_on_grid(s, zz, t_max, panels)
        };
        let f = [
            th(u0 - 2.0 * h),
            th(u0 - h),
            th(u0),
            th(u0 + h),
            th(u0 + 2.0 * h),
        ];
        let du1 = (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * h);
        let du2 = (-f[4] + 16.0 * f[3] - 30.0 * f[2] + 16.0 * f[1] - f[0]) / (12.0 * h * h);
        Ok((du2 - 2.0 * s * du1) / (z * z) - f[2])
    }
}

/// Evaluator of the cylinder extension w(x, y) of a field.
pub struct CylinderField<'a> {
    coeffs: Vec<f64>,
    basis: &'a BasisSpec,
    profile: &'a ExtensionProfile,
}

/// w(x, y) = sum_k u_k phi_k(x) theta(sqrt(lambda_k) y).
pub fn extend<'a>(
    field: &SpectralField,
    profile: &'a ExtensionProfile,
    basis: &'a BasisSpec,
) -> Result<CylinderField<'a>> {
    if field.len() != basis.modes {
        return Err(Error::DimensionMismatch {
            expected: basis.modes,
            got: field.len(),
        });
    }
    Ok(CylinderField {
        coeffs: field.coeffs().to_vec(),
        basis,
        profile,
    })
}

impl CylinderField<'_> {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let lam = self.basis.eigenvalue(k + 1);
            acc += c * self.basis.phi(k + 1, x) * self.profile.theta(lam.sqrt() * y);
        }
        acc
    }
}

/// Weighted cylinder energy (1/k_s) int y^{1-2s} |grad w|^2, computed
/// mode-by-mode through the normalization integral. Equals
/// sum u_k^2 lambda_k^s exactly when the profile integral equals k_s.
pub fn cylinder_energy(
    field: &SpectralField,
    profile: &ExtensionProfile,
    basis: &BasisSpec,
) -> Result<f64> {
    if field.len() != basis.modes {
        return Err(Error::DimensionMismatch {
            expected: basis.modes,
            got: field.len(),
        });
    }
    let per_mode = profile.norm_integral / profile.ks;
    let hs: f64 = field
        .coeffs()
        .iter()
        .zip(basis.eigenvalues.iter())
        .map(|(c, l)| c * c * l.powf(profile.s))
        .sum();
    Ok(per_mode * hs)
}

/// Richardson-extrapolated weighted Neumann trace, per mode:
/// -(1/k_s) y^{1-2s} d_y w -> lambda_k^s u_k as y -> 0. The default
/// sequence is y in {h, h/2, h/4} with h = 1e-2 / sqrt(lambda_k).
pub fn neumann_limit(
    field: &SpectralField,
    profile: &ExtensionProfile,
    basis: &BasisSpec,
) -> Result<SpectralField> {
    let zs = [1e-2, 5e-3, 2.5e-3];
    let factor = neumann_factor(profile, &zs)?;
    let coeffs: Vec<f64> = field
        .coeffs()
        .iter()
        .zip(basis.eigenvalues.iter())
        .map(|(c, l)| c * l.powf(profile.s) * factor)
        .collect();
    Ok(SpectralField::from_coeffs(coeffs))
}

/// Neumann limit with an explicit halving sequence y, y/2, y/4 shared by
/// all modes (each mode sees z_j = sqrt(lambda_k) y_j).
pub fn neumann_limit_at(
    field: &SpectralField,
    profile: &ExtensionProfile,
    basis: &BasisSpec,
    y_sequence: &[f64; 3],
) -> Result<SpectralField> {
    if !(y_sequence[0] > y_sequence[1] && y_sequence[1] > y_sequence[2] && y_sequence[2] > 0.0) {
        return Err(Error::InvalidConfig("y sequence must decrease toward 0".into()));
    }
    for w in y_sequence.windows(2) {
        if (w[1] / w[0] - 0.5).abs() > 1e-9 {
            return Err(Error::InvalidConfig("y sequence must halve".into()));
        }
    }
    let mut coeffs = Vec::with_capacity(field.len());
    for (c, l) in field.coeffs().iter().zip(basis.eigenvalues.iter()) {
        let sq = l.sqrt();
        let zs = [sq * y_sequence[0], sq * y_sequence[1], sq * y_sequence[2]];
        let factor = neumann_factor(profile, &zs)?;
        coeffs.push(c * l.powf(profile.s) * factor);
    }
    Ok(SpectralField::from_coeffs(coeffs))
}

/// Extrapolate -(1/k_s) z^{1-2s} theta'(z) -> 1 over a halving z triple.
/// The leading error exponents are 2-2s and min(2, 4-4s).
fn neumann_factor(profile: &ExtensionProfile, zs: &[f64; 3]) -> Result<f64> {
    let s = profile.s;
    let g = |z: f64| -(1.0 / profile.ks) * z.powf(1.0 - 2.0 * s) * profile.theta_prime(z);
    let a0 = g(zs[0]);
    let a1 = g(zs[1]);
    let a2 = g(zs[2]);
    let r1 = 2f64.powf(2.0 - 2.0 * s);
    let b0 = (r1 * a1 - a0) / (r1 - 1.0);
    let b1 = (r1 * a2 - a1) / (r1 - 1.0);
    let r2 = 2f64.powf((2.0f64).min(4.0 - 4.0 * s));
    let c = (r2 * b1 - b0) / (r2 - 1.0);
    if !c.is_finite() || (c - a2).abs() > 0.5 * a2.abs().max(1e-12) {
        return Err(Error::ExtrapolationUnstable(format!(
            "Neumann extrapolation drifted: raw {a2}, extrapolated {c}"
        )));
    }
    Ok(c)
}

/// Poisson-kernel extension of the bubble U for N = 1:
/// W(x, y) = c y^{2s} int U(t) / ((x-t)^2 + y^2)^{(1+2s)/2} dt with c fixed
/// by unit kernel mass, so W(., y) -> U as y -> 0+. Substituting
/// t = x + y sinh(w) gives smooth integrands for every y > 0.
pub fn poisson_extension_w(x: f64, y: f64, n: usize, s: f64) -> Result<f64> {
    if n != 1 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(y > 0.0) {
        return Err(Error::QuadratureFailure(format!("need y > 0, got {y}")));
    }
    let w_max = 18.0 * std::f64::consts::LN_10 / (2.0 * s) + 10.0;
    let panels = ((w_max * 1.5).ceil() as usize).clamp(16, 2048);
    let (gx, gw) = gauss_legendre(16);
    let h = 2.0 * w_max / panels as f64;
    let mut mass = 0.0;
    let mut val = 0.0;
    for j in 0..panels {
        let c = -w_max + (j as f64 + 0.5) * h;
        for (t, w) in gx.iter().zip(gw.iter()) {
            let u = c + 0.5 * h * t;
            let kernel = u.cosh().powf(-2.0 * s);
            mass += w * kernel;
            val += w * kernel * crate::bubbles::bubble_u(x + y * u.sinh(), n, s);
        }
    }
    if !(mass > 0.0) {
        return Err(Error::QuadratureFailure("kernel mass vanished".into()));
    }
    Ok(val / mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ks_anchors() {
        assert_relative_eq!(ks_constant(0.5), 1.0, max_relative = 1e-12);
        // independent oracle via the reflection identity:
        // k_{1/4} = sqrt(2) G(3/4)/G(1/4) = G(3/4)^2 / pi
        let oracle = gamma(0.75) * gamma(0.75) / std::f64::consts::PI;
        assert_relative_eq!(ks_constant(0.25), oracle, max_relative = 1e-12);
        assert_relative_eq!(ks_constant(0.25), 0.477_988_797, epsilon = 1e-7);
        // smoothness sweep
        let mut s = 0.05;
        while s < 0.95 {
            assert!((ks_constant(s + 1e-6) - ks_constant(s)).abs() < 1e-4);
            s += 0.05;
        }
    }

    #[test]
    fn theta_half_is_exponential() {
        let profile = theta_profile(0.5).unwrap();
        for (&z, t) in profile.z_grid().iter().zip(profile.theta_table()) {
            assert_relative_eq!(t, (-z).exp(), epsilon = 1e-10, max_relative = 1e-10);
        }
        // interpolated values too
        for z in [0.001, 0.37, 1.9, 12.0] {
            assert_relative_eq!(profile.theta(z), (-z).exp(), max_relative = 1e-8);
            assert_relative_eq!(profile.theta_prime(z), -(-z as f64).exp(), max_relative = 1e-8);
        }
        // normalization integral: int 2 e^{-2z} dz = 1 = k_{1/2}
        assert_relative_eq!(profile.norm_integral, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn theta_limits_and_monotonicity() {
        for s in [0.2, 0.3, 0.45] {
            let p = theta_profile(s).unwrap();
            // theta(0+) -> 1: fit theta = theta0 + c z^{2s} on two small z
            // and extrapolate to zero
            let (z1, z2) = (1e-6, 2e-6);
            let (t1, t2) = (theta_exact(s, z1).unwrap(), theta_exact(s, z2).unwrap());
            let c = (t2 - t1) / (z2.powf(2.0 * s) - z1.powf(2.0 * s));
            let theta0 = t1 - c * z1.powf(2.0 * s);
            assert_relative_eq!(theta0, 1.0, epsilon = 1e-6);
            // strictly decreasing on the table
            let table = p.theta_table();
            for w in table.windows(2) {
                assert!(w[1] < w[0]);
            }
            assert!(p.theta(Z_MAX) < 1e-15);
        }
    }

    #[test]
    fn ode_residual_below_tolerance() {
        // below z ~ 0.1 the finite-difference oracle itself hits its f64
        // floor (the 1/z^2 term amplifies stencil noise); the profile there
        // is covered by the closed-form and normalization checks instead
        for s in [0.2, 0.3, 0.45] {
            let p = theta_profile(s).unwrap();
            for z in [0.1, 0.3, 1.0, 4.0, 11.0, 20.0] {
                let r = p.ode_residual(z).unwrap();
                assert!(r.abs() < 1e-8, "s = {s}, z = {z}: residual {r:.3e}");
            }
        }
    }

    #[test]
    fn normalization_integral_equals_ks() {
        // the per-mode isometry: int z^{1-2s}(theta^2 + theta'^2) dz = k_s
        for s in [0.1, 0.3, 0.45, 0.5, 0.7] {
            let p = theta_profile(s).unwrap();
            assert_relative_eq!(p.norm_integral, p.ks, max_relative = 1e-7);
        }
    }

    #[test]
    fn extension_trace_and_lateral_conditions() {
        let basis = BasisSpec::new(16, 64);
        let profile = theta_profile(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = SpectralField::from_coeffs((0..16).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let w = extend(&f, &profile, &basis).unwrap();
        for &x in &[-0.7, -0.2, 0.4, 0.9] {
            assert_relative_eq!(w.eval(x, 0.0), f.eval_at(x), epsilon = 1e-8);
        }
        for &y in &[0.0, 0.3, 2.0] {
            assert!(w.eval(1.0, y).abs() < 1e-12);
            assert!(w.eval(-1.0, y).abs() < 1e-12);
        }
        // single mode: w(x, y) = phi_1(x) theta(sqrt(lambda_1) y)
        let m1 = SpectralField::mode(1, 16);
        let w1 = extend(&m1, &profile, &basis).unwrap();
        let y = 0.17;
        let expect = basis.phi(1, 0.32) * profile.theta(basis.eigenvalue(1).sqrt() * y);
        assert_relative_eq!(w1.eval(0.32, y), expect, epsilon = 1e-14);
    }

    #[test]
    fn isometry_on_random_fields() {
        let basis = BasisSpec::new(24, 96);
        let profile = theta_profile(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let f =
                SpectralField::from_coeffs((0..24).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let e = cylinder_energy(&f, &profile, &basis).unwrap();
            let hs = crate::field::hs_norm_sq(&f, 0.3, &basis).unwrap();
            assert!((e - hs).abs() / hs < 1e-6, "isometry defect {:.3e}", (e - hs) / hs);
        }
        // zero field and additivity over orthogonal modes
        assert_eq!(
            cylinder_energy(&SpectralField::zeros(24), &profile, &basis).unwrap(),
            0.0
        );
        let a = SpectralField::mode(1, 24);
        let b = SpectralField::mode(5, 24);
        let ea = cylinder_energy(&a, &profile, &basis).unwrap();
        let eb = cylinder_energy(&b, &profile, &basis).unwrap();
        let eab = cylinder_energy(&a.axpy(1.0, &b), &profile, &basis).unwrap();
        assert_relative_eq!(eab, ea + eb, max_relative = 1e-12);
    }

    #[test]
    fn neumann_limit_recovers_fractional_laplacian() {
        let basis = BasisSpec::new(16, 64);
        for s in [0.3, 0.45] {
            let profile = theta_profile(s).unwrap();
            let f = SpectralField::mode(1, 16).axpy(0.6, &SpectralField::mode(7, 16));
            let nl = neumann_limit(&f, &profile, &basis).unwrap();
            let frac = crate::field::frac_laplacian(&f, s, &basis).unwrap();
            for (a, b) in nl.coeffs().iter().zip(frac.coeffs()) {
                if b.abs() > 0.0 {
                    assert!(
                        ((a - b) / b).abs() < 0.01,
                        "s = {s}: per-mode error {:.3e}",
                        (a - b) / b
                    );
                }
            }
        }
    }

    #[test]
    fn neumann_closed_form_at_half() {
        // s = 1/2: -d_y e^{-sqrt(lambda) y}|_0 = sqrt(lambda), k_s = 1
        let basis = BasisSpec::new(8, 32);
        let profile = theta_profile(0.5).unwrap();
        let f = SpectralField::mode(3, 8);
        let nl = neumann_limit(&f, &profile, &basis).unwrap();
        assert_relative_eq!(
            nl.coeffs()[2],
            basis.eigenvalue(3).sqrt(),
            max_relative = 1e-6
        );
        // linearity over two modes
        let g = SpectralField::mode(1, 8).axpy(2.0, &SpectralField::mode(3, 8));
        let ng = neumann_limit(&g, &profile, &basis).unwrap();
        let n1 = neumann_limit(&SpectralField::mode(1, 8), &profile, &basis).unwrap();
        let combo = n1.coeffs()[0] + 0.0;
        assert_relative_eq!(ng.coeffs()[0], combo, max_relative = 1e-12);
        assert_relative_eq!(ng.coeffs()[2], 2.0 * nl.coeffs()[2], max_relative = 1e-12);

        // explicit halving sequence path
        let seq = neumann_limit_at(&f, &profile, &basis, &[1e-3, 5e-4, 2.5e-4]).unwrap();
        assert_relative_eq!(seq.coeffs()[2], basis.eigenvalue(3).sqrt(), max_relative = 1e-6);
        assert!(neumann_limit_at(&f, &profile, &basis, &[1e-3, 6e-4, 2.5e-4]).is_err());
    }

    #[test]
    fn poisson_extension_calibration_decay_symmetry() {
        let s = 0.3;
        // boundary calibration: W(0, y) -> U(0) = 1 with deficit ~ y^{2s}
        let w0 = poisson_extension_w(0.0, 1e-4, 1, s).unwrap();
        assert!((w0 - 1.0).abs() < 2e-3, "W(0, 1e-4) = {w0}");
        let w_closer = poisson_extension_w(0.0, 1e-5, 1, s).unwrap();
        assert!((w_closer - 1.0).abs() < 1e-3, "W(0, 1e-5) = {w_closer}");
        assert!((w_closer - 1.0).abs() < (w0 - 1.0).abs());
        // decreasing in y at the center
        let mut prev = w0;
        for y in [0.1, 0.5, 1.0, 3.0] {
            let w = poisson_extension_w(0.0, y, 1, s).unwrap();
            assert!(w < prev);
            prev = w;
        }
        // even in x
        for (x, y) in [(0.4, 0.2), (1.3, 0.7)] {
            assert_relative_eq!(
                poisson_extension_w(x, y, 1, s).unwrap(),
                poisson_extension_w(-x, y, 1, s).unwrap(),
                max_relative = 1e-12
            );
        }
        assert!(poisson_extension_w(0.0, 0.0, 1, s).is_err());
    }
}
