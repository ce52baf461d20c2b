//! Exponent sweeps toward the critical exponent and the concentration
//! diagnostics: peak growth, boundary drift, rescaled profiles, bubble
//! remainders, localized mass and the scalar/system identity.

use serde::Serialize;

use crate::basis::{make_basis, BasisSpec};
use crate::bubbles::{bubble_u, fit_profile, ProfileFit};
use crate::config::ProblemConfig;
use crate::energy::{cpq, henon_weights, ExponentConfig};
use crate::error::{Error, Result};
use crate::extension::{extend, theta_profile, ExtensionProfile};
use crate::field::{hs_norm_sq, to_coefficients, to_physical};
use crate::solver::{minimize_scalar, minimize_system, GroundState, SolverOptions};

/// A sweep of system solves at fixed q with p increasing toward 2*_s - q.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub config: ProblemConfig,
    pub q: f64,
    /// Strictly increasing p values with p + q < 2*_s.
    pub p_list: Vec<f64>,
    /// Seed each solve with the previous minimizer.
    pub warm_start: bool,
    pub options: SolverOptions,
    /// When 2*_s - (p+q) falls below this gap the iteration budget is
    /// multiplied by `near_critical_iter_factor`.
    pub near_critical_gap: f64,
    pub near_critical_iter_factor: f64,
    /// Parallelism cap for independent (cold-started) sweep points.
    pub threads: usize,
}

impl SweepPlan {
    pub fn new(config: ProblemConfig, q: f64, p_list: Vec<f64>) -> Self {
        SweepPlan {
            config,
            q,
            p_list,
            warm_start: true,
            options: SolverOptions::default(),
            near_critical_gap: 0.2,
            near_critical_iter_factor: 2.0,
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.options.validate()?;
        let crit = self.config.crit_exp();
        if self.p_list.is_empty() {
            return Err(Error::InvalidConfig("empty p list".into()));
        }
        for w in self.p_list.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidConfig("p list must be strictly increasing".into()));
            }
        }
        for &p in &self.p_list {
            if p <= 1.0 {
                return Err(Error::InvalidConfig(format!("p must exceed 1, got {p}")));
            }
            if p + self.q >= crit && !self.options.critical_mode {
                return Err(Error::InvalidConfig(format!(
                    "p + q = {} must stay below 2*_s = {crit}",
                    p + self.q
                )));
            }
        }
        if self.q <= 1.0 {
            return Err(Error::InvalidConfig(format!("q must exceed 1, got {}", self.q)));
        }
        Ok(())
    }
}

/// Per-exponent concentration diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub p_eps: f64,
    pub q: f64,
    pub quotient: f64,
    pub multiplier: f64,
    /// Peak trace values of the two components.
    pub m1: f64,
    pub m2: f64,
    /// m1 / m2.
    pub ratio: f64,
    /// Sub-grid argmax of the first component (nonnegative-x tie break).
    pub x_max: f64,
    /// Distance of the peak to the boundary.
    pub d_eps: f64,
    /// Concentration scale from lambda^{(N-2s)/2} M1 = 1.
    pub lambda_eps: f64,
    pub d_over_lambda: f64,
    /// lambda^{N - (N-2s)(p+q)/2}; equals 1 exactly at the critical sum.
    pub h_eps: f64,
    /// Relative H^s norm of the cutoff bubble remainder.
    pub remainder_rel: f64,
    /// Fitted amplitude ratio a/b of the rescaled pair.
    pub amp_ratio_fit: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Extension samples stayed below the trace maximum (not part of the
    /// CSV schema; maximum-principle spot check).
    #[serde(skip)]
    pub max_principle_ok: bool,
    /// The remainder cutoff had to shrink to fit inside the domain.
    #[serde(skip)]
    pub remainder_window_shrunk: bool,
}

/// Sub-grid peak of a field: (x, value). The discrete argmax (preferring
/// the nonnegative-x maximizer on ties) seeds a golden-section polish of
/// the synthesized trace over the bracketing grid cells.
fn refined_peak(field: &crate::field::SpectralField, samples: &[f64], basis: &BasisSpec) -> (f64, f64) {
    let mut best = 0usize;
    for i in 1..samples.len() {
        let v = samples[i];
        let bv = samples[best];
        if v > bv * (1.0 + 1e-12) + f64::MIN_POSITIVE {
            best = i;
        } else if (v - bv).abs() <= 1e-12 * bv.abs() && basis.grid[best] < 0.0 && basis.grid[i] >= 0.0
        {
            best = i;
        }
    }
    let i = best;
    let h = basis.grid_weight;
    let mut lo = (basis.grid[i] - h).max(-1.0);
    let mut hi = (basis.grid[i] + h).min(1.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = field.eval_at(x1);
    let mut f2 = field.eval_at(x2);
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = field.eval_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = field.eval_at(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, field.eval_at(x).max(samples[i]))
}

/// All per-record diagnostics for a system ground state.
pub fn diagnostics(
    state: &GroundState,
    config: &ProblemConfig,
    basis: &BasisSpec,
    profile: &ExtensionProfile,
) -> Result<SweepRecord> {
    let v = state
        .v
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("diagnostics needs a system state".into()))?;
    let us = to_physical(&state.u, basis)?;
    let vs = to_physical(v, basis)?;
    let (x_max, m1) = refined_peak(&state.u, us, basis);
    let (_, m2) = refined_peak(v, vs, basis);
    let n = config.n as f64;
    let two_s = 2.0 * config.s;
    let lambda_eps = m1.powf(-2.0 / (n - two_s));
    let d_eps = 1.0 - x_max.abs();
    let sum = state.p + state.q;
    let h_eps = lambda_eps.powf(n - (n - two_s) * sum / 2.0);

    // maximum principle spot check: cylinder samples below the trace peak
    let w = extend(&state.u, profile, basis)?;
    let mut max_principle_ok = true;
    for ix in 0..10 {
        let x = -0.9 + 0.2 * ix as f64;
        for iy in 0..10 {
            let y = 1e-3 * 2.2f64.powi(iy);
            if w.eval(x, y) > m1 * (1.0 + 1e-8) {
                max_principle_ok = false;
            }
        }
    }

    // amplitude ratio from the rescaled-window fit (lenient window so the
    // column is populated even before concentration sets in)
    let amp_ratio_fit = match lenient_profile_fit(state, x_max, m1, lambda_eps, d_eps, config, basis)
    {
        Ok(fit) => fit.a / fit.b,
        Err(_) => f64::NAN,
    };

    let mut record = SweepRecord {
        p_eps: state.p,
        q: state.q,
        quotient: state.quotient,
        multiplier: state.multiplier,
        m1,
        m2,
        ratio: m1 / m2,
        x_max,
        d_eps,
        lambda_eps,
        d_over_lambda: d_eps / lambda_eps,
        h_eps,
        remainder_rel: f64::NAN,
        amp_ratio_fit,
        iterations: state.iterations,
        converged: state.converged,
        max_principle_ok,
        remainder_window_shrunk: false,
    };
    let (rem, shrunk) = bubble_remainder(state, &record, config, basis)?;
    record.remainder_rel = rem;
    record.remainder_window_shrunk = shrunk;
    Ok(record)
}

/// Rescaled trace profiles around the peak: xi grid, u-tilde, v-tilde.
/// The window is |xi| <= d/(2 lambda); errors when that is below 4.
pub fn rescaled_profile(
    state: &GroundState,
    record: &SweepRecord,
    points: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let ratio = record.d_eps / record.lambda_eps;
    if ratio < 4.0 {
        return Err(Error::WindowTooSmall { ratio });
    }
    let w = (0.5 * ratio).min(60.0);
    sample_window(state, record, w, points)
}

fn sample_window(
    state: &GroundState,
    record: &SweepRecord,
    half_width: f64,
    points: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let v = state
        .v
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("need a system state".into()))?;
    let lam = record.lambda_eps;
    let scale = 1.0 / record.m1; // lambda^{(N-2s)/2}
    let mut xi = Vec::with_capacity(points);
    let mut ut = Vec::with_capacity(points);
    let mut vt = Vec::with_capacity(points);
    for i in 0..points {
        let t = -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64;
        let x = record.x_max + lam * t;
        if x <= -1.0 || x >= 1.0 {
            continue;
        }
        xi.push(t);
        ut.push(scale * state.u.eval_at(x));
        vt.push(scale * v.eval_at(x));
    }
    Ok((xi, ut, vt))
}

fn lenient_profile_fit(
    state: &GroundState,
    x_max: f64,
    m1: f64,
    lambda: f64,
    d_eps: f64,
    config: &ProblemConfig,
    _basis: &BasisSpec,
) -> Result<ProfileFit> {
    let domain_cap = 0.98 * (1.0 - x_max.abs().max(0.0)).min(1.0 + x_max) / lambda;
    let half = (d_eps / (2.0 * lambda)).max(4.0).min(60.0).min(domain_cap.max(1.0));
    let record_like = SweepRecord {
        p_eps: state.p,
        q: state.q,
        quotient: state.quotient,
        multiplier: state.multiplier,
        m1,
        m2: m1,
        ratio: 1.0,
        x_max,
        d_eps,
        lambda_eps: lambda,
        d_over_lambda: d_eps / lambda,
        h_eps: 1.0,
        remainder_rel: f64::NAN,
        amp_ratio_fit: f64::NAN,
        iterations: 0,
        converged: true,
        max_principle_ok: true,
        remainder_window_shrunk: false,
    };
    let (xi, ut, vt) = sample_window(state, &record_like, half, 257)?;
    fit_profile(&xi, &ut, &vt, config.n, config.s)
}

/// Relative H^s norm of the cutoff difference between the trace and the
/// peak-matched bubble M1 U((x - x_max)/lambda) (second component scaled by
/// the fitted amplitude ratio, falling back to its own peak value).
/// Returns (value, cutoff_shrunk_to_fit).
pub fn bubble_remainder(
    state: &GroundState,
    record: &SweepRecord,
    config: &ProblemConfig,
    basis: &BasisSpec,
) -> Result<(f64, bool)> {
    let v = state
        .v
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("need a system state".into()))?;
    let r_target = 0.25f64;
    let r_max = (1.0 - record.x_max.abs()).max(1e-6);
    let r_outer = r_target.min(r_max);
    let shrunk = r_outer < r_target;
    let r_inner = 0.5 * r_outer;
    let cutoff = |x: f64| -> f64 {
        let d = (x - record.x_max).abs();
        if d <= r_inner {
            1.0
        } else if d >= r_outer {
            0.0
        } else {
            let t = (d - r_inner) / (r_outer - r_inner);
            1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
        }
    };
    let amp_v = if record.amp_ratio_fit.is_finite() && record.amp_ratio_fit > 0.0 {
        record.m1 / record.amp_ratio_fit
    } else {
        record.m2
    };
    let us = to_physical(&state.u, basis)?;
    let vs = to_physical(v, basis)?;
    let mut ru = Vec::with_capacity(us.len());
    let mut rv = Vec::with_capacity(vs.len());
    for (i, &x) in basis.grid.iter().enumerate() {
        let c = cutoff(x);
        let m = bubble_u((x - record.x_max) / record.lambda_eps, config.n, config.s);
        ru.push(c * (us[i] - record.m1 * m));
        rv.push(c * (vs[i] - amp_v * m));
    }
    let fu = to_coefficients(&ru, basis)?;
    let fv = to_coefficients(&rv, basis)?;
    let num = hs_norm_sq(&fu, config.s, basis)? + hs_norm_sq(&fv, config.s, basis)?;
    let den = hs_norm_sq(&state.u, config.s, basis)? + hs_norm_sq(v, config.s, basis)?;
    if den == 0.0 {
        return Ok((0.0, shrunk));
    }
    Ok(((num / den).sqrt(), shrunk))
}

/// Fraction of the constraint integral int |x|^a |u|^p |v|^q carried by
/// {|x - center| < radius}.
pub fn mass_fraction(
    state: &GroundState,
    center: f64,
    radius: f64,
    basis: &BasisSpec,
) -> Result<f64> {
    assert!(radius > 0.0, "mass_fraction needs a positive radius");
    let hw = henon_weights(state.alpha, basis);
    let us = basis.synth_quad(state.u.coeffs());
    let inner_of = |values: &[f64]| -> (f64, f64) {
        let mut total = 0.0;
        let mut inner = 0.0;
        for ((&x, &f), &w) in basis.quad.nodes.iter().zip(values.iter()).zip(hw.iter()) {
            let m = w * f;
            total += m;
            if (x - center).abs() < radius {
                inner += m;
            }
        }
        (inner, total)
    };
    let values: Vec<f64> = match &state.v {
        Some(v) => {
            let vs = basis.synth_quad(v.coeffs());
            us.iter()
                .zip(vs.iter())
                .map(|(&u, &v)| u.abs().powf(state.p) * v.abs().powf(state.q))
                .collect()
        }
        None => us.iter().map(|&u| u.abs().powf(state.p)).collect(),
    };
    let (inner, total) = inner_of(&values);
    if total <= 0.0 {
        return Ok(0.0);
    }
    Ok((inner / total).clamp(0.0, 1.0))
}

/// Everything a sweep produces: ordered records plus the states behind them
/// (states are None when the solver failed without a usable iterate).
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub states: Vec<Option<GroundState>>,
}

/// Run the exponent sweep. Solver failures yield records flagged
/// unconverged; only configuration errors propagate.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepOutcome> {
    plan.validate()?;
    let basis = make_basis(&plan.config)?;
    let profile = theta_profile(plan.config.s)?;
    let crit = plan.config.crit_exp();

    let solve_one = |p: f64, init: Option<(&crate::field::SpectralField, &crate::field::SpectralField)>|
     -> Result<(SweepRecord, Option<GroundState>)> {
        let exp = ExponentConfig::new(p, plan.q)?;
        let mut opts = plan.options.clone();
        if crit - (p + plan.q) < plan.near_critical_gap {
            opts.max_iters =
                (opts.max_iters as f64 * plan.near_critical_iter_factor).ceil() as usize;
        }
        let solved = minimize_system(&plan.config, &basis, &exp, &opts, init);
        let state = match solved {
            Ok(state) => Some(state),
            Err(Error::NotConverged { state, .. }) => Some(*state),
            Err(Error::Numerical(_)) => None,
            Err(e) => return Err(e),
        };
        let record = match &state {
            Some(st) => diagnostics(st, &plan.config, &basis, &profile)?,
            None => failed_record(p, plan.q),
        };
        Ok((record, state))
    };

    let n = plan.p_list.len();
    let mut records: Vec<SweepRecord> = Vec::with_capacity(n);
    let mut states: Vec<Option<GroundState>> = Vec::with_capacity(n);

    if plan.warm_start || plan.threads <= 1 {
        let mut seed: Option<GroundState> = None;
        for &p in &plan.p_list {
            let init = if plan.warm_start {
                seed.as_ref().and_then(|s| s.v.as_ref().map(|v| (&s.u, v)))
            } else {
                None
            };
            let (record, state) = solve_one(p, init)?;
            records.push(record);
            if plan.warm_start {
                if let Some(st) = &state {
                    if st.converged {
                        seed = state.clone();
                    }
                }
            }
            states.push(state);
        }
    } else {
        // independent points: compute in parallel, assemble in plan order
        let mut slots: Vec<Option<Result<(SweepRecord, Option<GroundState>)>>> =
            (0..n).map(|_| None).collect();
        let threads = plan.threads.min(n);
        std::thread::scope(|scope| {
            let chunks = slots.chunks_mut(n.div_ceil(threads));
            for (chunk_idx, chunk) in chunks.enumerate() {
                let offset = chunk_idx * n.div_ceil(threads);
                let solve_one = &solve_one;
                let p_list = &plan.p_list;
                scope.spawn(move || {
                    for (j, slot) in chunk.iter_mut().enumerate() {
                        *slot = Some(solve_one(p_list[offset + j], None));
                    }
                });
            }
        });
        for slot in slots {
            let (record, state) = slot.expect("all sweep slots filled")?;
            records.push(record);
            states.push(state);
        }
    }
    Ok(SweepOutcome { records, states })
}

fn failed_record(p: f64, q: f64) -> SweepRecord {
    SweepRecord {
        p_eps: p,
        q,
        quotient: f64::NAN,
        multiplier: f64::NAN,
        m1: f64::NAN,
        m2: f64::NAN,
        ratio: f64::NAN,
        x_max: f64::NAN,
        d_eps: f64::NAN,
        lambda_eps: f64::NAN,
        d_over_lambda: f64::NAN,
        h_eps: f64::NAN,
        remainder_rel: f64::NAN,
        amp_ratio_fit: f64::NAN,
        iterations: 0,
        converged: false,
        max_principle_ok: false,
        remainder_window_shrunk: false,
    }
}

/// Dual-solve check of S_sys = C_{p,q} S_scal and of the minimizer
/// proportionality u/v = sqrt(p/q).
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub s_scalar: f64,
    pub s_system: f64,
    pub cpq: f64,
    /// |S_sys - C_{p,q} S_scal| / S_sys.
    pub deviation: f64,
    /// Max relative deviation of u/v from sqrt(p/q) where v is
    /// non-negligible.
    pub uv_max_deviation: f64,
    pub scalar_iterations: usize,
    pub system_iterations: usize,
}

pub fn identity_check(
    config: &ProblemConfig,
    basis: &BasisSpec,
    exp: &ExponentConfig,
    opts: &SolverOptions,
) -> Result<IdentityReport> {
    let scalar = minimize_scalar(config, basis, exp.sum(), opts, None)?;
    let system = minimize_system(config, basis, exp, opts, None)?;
    let c = cpq(exp.p, exp.q);
    let deviation = (system.quotient - c * scalar.quotient).abs() / system.quotient;

    let us = to_physical(&system.u, basis)?;
    let vs = to_physical(system.v.as_ref().unwrap(), basis)?;
    let m2 = vs.iter().cloned().fold(0.0f64, f64::max);
    let target = (exp.p / exp.q).sqrt();
    let mut uv_max_deviation = 0.0f64;
    for (&u, &v) in us.iter().zip(vs.iter()) {
        if v > 1e-6 * m2 {
            uv_max_deviation = uv_max_deviation.max((u / v - target).abs() / target);
        }
    }
    Ok(IdentityReport {
        p: exp.p,
        q: exp.q,
        alpha: config.alpha,
        s_scalar: scalar.quotient,
        s_system: system.quotient,
        cpq: c,
        deviation,
        uv_max_deviation,
        scalar_iterations: scalar.iterations,
        system_iterations: system.iterations,
    })
}

/// Gap between the sweep quotients and the alpha-independent critical
/// limit C_{p,q} S-hat.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalityReport {
    pub s_hat: f64,
    pub gaps: Vec<f64>,
    /// gaps / (C_{p,q} S-hat).
    pub relative_gaps: Vec<f64>,
    /// Relative gaps decrease across the sweep tail (last 4 records).
    pub tail_decreasing: bool,
    pub final_relative_gap: f64,
}

pub fn criticality_limit_check(records: &[SweepRecord], s_hat: f64) -> Result<CriticalityReport> {
    let converged: Vec<&SweepRecord> = records.iter().filter(|r| r.converged).collect();
    if converged.len() < 4 {
        return Err(Error::InvalidConfig(format!(
            "need at least 4 converged records, got {}",
            converged.len()
        )));
    }
    let mut gaps = Vec::with_capacity(converged.len());
    let mut relative = Vec::with_capacity(converged.len());
    for r in &converged {
        let limit = cpq(r.p_eps, r.q) * s_hat;
        let gap = (r.quotient - limit).abs();
        gaps.push(gap);
        relative.push(gap / limit);
    }
    let tail = &relative[relative.len() - 4..];
    let tail_decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    Ok(CriticalityReport {
        s_hat,
        gaps,
        relative_gaps: relative.clone(),
        tail_decreasing,
        final_relative_gap: *relative.last().unwrap(),
    })
}

/// Rescaled-profile convergence across a sweep: amplitude ratios against
/// sqrt(p/q), fit residuals, and the even-symmetry defect of u-tilde.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileEntry {
    pub p_eps: f64,
    pub amp_ratio: f64,
    pub target_ratio: f64,
    pub fit_residual: f64,
    pub fit_scale: f64,
    pub symmetry_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub entries: Vec<ProfileEntry>,
    pub skipped_small_window: usize,
}

pub fn profile_convergence(
    states: &[Option<GroundState>],
    records: &[SweepRecord],
    config: &ProblemConfig,
) -> Result<ProfileReport> {
    let mut entries = Vec::new();
    let mut skipped = 0usize;
    let mut last_ratio = f64::NAN;
    for (state, record) in states.iter().zip(records.iter()) {
        let Some(state) = state else { continue };
        if !record.converged {
            continue;
        }
        match rescaled_profile(state, record, 257) {
            Ok((xi, ut, vt)) => {
                let fit = fit_profile(&xi, &ut, &vt, config.n, config.s)?;
                // symmetry defect of u-tilde about xi = 0
                let mut defect = 0.0f64;
                let peak = ut.iter().cloned().fold(0.0f64, f64::max);
                let m = xi.len();
                for i in 0..m {
                    defect = defect.max((ut[i] - ut[m - 1 - i]).abs());
                }
                entries.push(ProfileEntry {
                    p_eps: record.p_eps,
                    amp_ratio: fit.a / fit.b,
                    target_ratio: (record.p_eps / record.q).sqrt(),
                    fit_residual: fit.residual,
                    fit_scale: fit.scale,
                    symmetry_defect: defect / peak,
                });
            }
            Err(Error::WindowTooSmall { ratio }) => {
                skipped += 1;
                last_ratio = ratio;
            }
            Err(e) => return Err(e),
        }
    }
    if entries.len() < 2 {
        return Err(Error::WindowTooSmall {
            ratio: last_ratio,
        });
    }
    Ok(ProfileReport {
        entries,
        skipped_small_window: skipped,
    })
}
