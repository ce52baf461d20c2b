//! Gamma and modified Bessel K, self-contained.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7, n = 9), with the
/// reflection formula below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Modified Bessel K_nu(z) for z > 0, nu >= 0, by the integral
/// representation K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt,
/// truncated where the integrand falls below 1e-18 of its peak.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::QuadratureFailure(format!("bessel_k needs z > 0, got {z}")));
    }
    if nu < 0.0 {
        return bessel_k(-nu, z); // K_{-nu} = K_nu
    }
    let (t_max, panels) = bessel_grid(nu, z);
    let acc = bessel_k_on_grid(nu, z, t_max, panels);
    let edge = (-z * t_max.cosh() + ln_cosh(nu * t_max)).exp();
    if edge > 1e-17 * (acc.abs() + (-z).exp()) {
        return Err(Error::QuadratureFailure(format!(
            "tail truncation bound unmet at t = {t_max} (integrand {edge:.3e})"
        )));
    }
    Ok(acc)
}

/// Truncation point and panel count for the K_nu integrand at (nu, z).
/// Sharing one grid across nearby z values makes their quadrature errors
/// cancel in finite differences.
pub(crate) fn bessel_grid(nu: f64, z: f64) -> (f64, usize) {
    // ln of integrand at t = 0 is -z; cut where -z cosh t + ln cosh(nu t)
    // drops 18 decades below that peak
    let budget = z + 18.0 * std::f64::consts::LN_10;
    let mut t_max: f64 = ((budget / z).max(1.0 + 1e-12)).acosh().max(0.5);
    for _ in 0..40 {
        let lc = ln_cosh(nu * t_max);
        let next = (((budget + lc) / z).max(1.0 + 1e-12)).acosh().max(0.5);
        if (next - t_max).abs() < 1e-12 * t_max {
            t_max = next;
            break;
        }
        t_max = next;
    }
    // panel density follows the integrand's scale min(1, 1/sqrt(z))
    let panels = ((t_max * (2.0 + 2.0 * z.sqrt())).ceil() as usize).clamp(8, 4096);
    (t_max, panels)
}

/// The K_nu integral over a fixed truncated grid (no tail verification).
pub(crate) fn bessel_k_on_grid(nu: f64, z: f64, t_max: f64, panels: usize) -> f64 {
    let (gx, gw) = gauss_legendre(16);
    let h = t_max / panels as f64;
    let mut acc = 0.0;
    for j in 0..panels {
        let c = (j as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(gw.iter()) {
            let t = c + 0.5 * h * x;
            // exp(-z cosh t + ln cosh(nu t)) evaluated stably
            acc += w * (-z * t.cosh() + ln_cosh(nu * t)).exp();
        }
    }
    acc * 0.5 * h
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a > 20.0 {
        a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
    } else {
        a.cosh().ln()
    }
}
