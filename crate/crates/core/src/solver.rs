//! Constrained minimization of the weighted Rayleigh quotients.
//!
//! Projected gradient flow on the constraint manifold {T = 1} with a
//! Barzilai-Borwein trial step and monotone Armijo backtracking. After each
//! step the trace samples are replaced by their absolute values (minimizing
//! sequences may be assumed nonnegative) and the iterate is renormalized
//! onto the manifold, so the recorded quotient sequence is nonincreasing by
//! construction.

use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::config::ProblemConfig;
use crate::energy::{
    cpq, henon_factor, henon_weights, mixed_term_samples, scalar_term_samples,
    t_gradient_samples, t_gradient_scalar_samples, ExponentConfig,
};
use crate::error::{Error, Result};
use crate::field::{tail_energy_fraction, to_coefficients, SpectralField};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Iteration budget.
    pub max_iters: usize,
    /// Projected-gradient threshold, relative to max(1, quotient).
    pub tol_grad: f64,
    /// Relative quotient stall threshold (joint criterion with tol_grad).
    pub tol_quotient: f64,
    /// Initial trial step before Barzilai-Borwein information exists.
    pub step_init: f64,
    /// Backtracking factor in (0, 1).
    pub backtrack: f64,
    /// Center of the deterministic initialization bump.
    pub bump_center: f64,
    /// Width of the initialization bump.
    pub bump_width: f64,
    /// Replace trace samples by absolute values after each step.
    pub positivity: bool,
    /// Degeneration flag: permit p+q >= 2*_s (non-attainment probes).
    pub critical_mode: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: 20_000,
            tol_grad: 3e-7,
            tol_quotient: 1e-12,
            step_init: 0.5,
            backtrack: 0.5,
            bump_center: 0.5,
            bump_width: 0.25,
            positivity: true,
            critical_mode: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.tol_grad > 0.0 && self.tol_quotient > 0.0 && self.step_init > 0.0) {
            return Err(Error::InvalidConfig("solver tolerances must be positive".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidConfig("backtrack factor must lie in (0,1)".into()));
        }
        Ok(())
    }
}

/// A solved minimizer with its Lagrange data and convergence metadata.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub u: SpectralField,
    /// None for scalar problems.
    pub v: Option<SpectralField>,
    /// Quotient value (the estimate of S^alpha).
    pub quotient: f64,
    /// Lagrange multiplier lambda = (||u||^2 + ||v||^2)/(p+q) on {T = 1}.
    pub multiplier: f64,
    /// Rescaling factor beta = ((p+q) lambda / 2)^{1/(p+q-2)} turning the
    /// constrained minimizer into a weak solution.
    pub beta: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Relative coefficient-space residual of the Euler-Lagrange system.
    pub residual_norm: f64,
    /// Fraction of H^s energy in the top 10% of modes (resolution health).
    pub tail_fraction: f64,
    // problem metadata
    pub s: f64,
    pub alpha: f64,
    /// Scalar problems store (p, q) = (r, 0).
    pub p: f64,
    pub q: f64,
}

impl GroundState {
    pub fn is_scalar(&self) -> bool {
        self.v.is_none()
    }

    pub fn exponent_sum(&self) -> f64 {
        self.p + self.q
    }
}

enum Objective {
    Scalar { r: f64 },
    System { p: f64, q: f64 },
}

impl Objective {
    fn sum(&self) -> f64 {
        match self {
            Objective::Scalar { r } => *r,
            Objective::System { p, q } => p + q,
        }
    }
}

struct Engine<'a> {
    basis: &'a BasisSpec,
    obj: Objective,
    lam_s: Vec<f64>,
    /// Sobolev preconditioner 1/(2 lambda_k^s): gradient steps measured in
    /// the H^s metric stay well conditioned as the mode count grows.
    precond: Vec<f64>,
    /// quadrature weight times |x|^alpha
    hw: Vec<f64>,
    /// |x|^alpha alone (weight applied by the projection)
    xa: Vec<f64>,
    positivity: bool,
}

impl<'a> Engine<'a> {
    fn new(basis: &'a BasisSpec, obj: Objective, alpha: f64, s: f64, positivity: bool) -> Self {
        let lam_s: Vec<f64> = basis.eigenvalues.iter().map(|l| l.powf(s)).collect();
        let precond = lam_s.iter().map(|l| 1.0 / (2.0 * l)).collect();
        Engine {
            basis,
            lam_s,
            precond,
            hw: henon_weights(alpha, basis),
            xa: henon_factor(alpha, basis),
            obj,
            positivity,
        }
    }

    fn t_value(&self, c: &[Vec<f64>]) -> f64 {
        match self.obj {
            Objective::Scalar { r } => {
                let ws = self.basis.synth_quad(&c[0]);
                scalar_term_samples(&ws, r, &self.hw)
            }
            Objective::System { p, q } => {
                let us = self.basis.synth_quad(&c[0]);
                let vs = self.basis.synth_quad(&c[1]);
                mixed_term_samples(&us, &vs, p, q, &self.hw)
            }
        }
    }

    fn t_gradient(&self, c: &[Vec<f64>]) -> Vec<Vec<f64>> {
        match self.obj {
            Objective::Scalar { r } => {
                let ws = self.basis.synth_quad(&c[0]);
                vec![self.basis.project_quad(&t_gradient_scalar_samples(&ws, r, &self.xa))]
            }
            Objective::System { p, q } => {
                let us = self.basis.synth_quad(&c[0]);
                let vs = self.basis.synth_quad(&c[1]);
                let (gu, gv) = t_gradient_samples(&us, &vs, p, q, &self.xa);
                vec![self.basis.project_quad(&gu), self.basis.project_quad(&gv)]
            }
        }
    }

    fn energy(&self, c: &[Vec<f64>]) -> f64 {
        c.iter()
            .map(|ck| {
                ck.iter()
                    .zip(self.lam_s.iter())
                    .map(|(x, l)| x * x * l)
                    .sum::<f64>()
            })
            .sum()
    }

    /// Scale onto {T = 1}. One pass leaves |T - 1| at the powf rounding
    /// level unless the starting value was extreme, in which case the scale
    /// is verified once more.
    fn normalize(&self, c: &mut [Vec<f64>]) -> Result<()> {
        for pass in 0..3 {
            let t = self.t_value(c);
            if !(t > 1e-300) || !t.is_finite() {
                return Err(Error::ZeroDenominator(t));
            }
            if (t - 1.0).abs() < 1e-14 {
                break;
            }
            let scale = t.powf(-1.0 / self.obj.sum());
            for ck in c.iter_mut() {
                for x in ck.iter_mut() {
                    *x *= scale;
                }
            }
            // a moderate scale is exact to rounding after one pass
            if pass == 0 && t.ln().abs() < 1.0 {
                break;
            }
        }
        Ok(())
    }

    /// Absolute value of the trace, re-projected onto the basis. On fields
    /// that are already nonnegative on the grid this is the exact identity
    /// (returns false when nothing changed).
    fn positivity_project(&self, c: &mut [Vec<f64>]) -> bool {
        let mut changed = false;
        for ck in c.iter_mut() {
            let samples = self.basis.synth_grid(ck);
            if samples.iter().all(|&s| s >= 0.0) {
                continue;
            }
            changed = true;
            let abs: Vec<f64> = samples.iter().map(|s| s.abs()).collect();
            let h = self.basis.grid_weight;
            for (k, x) in ck.iter_mut().enumerate() {
                *x = h * crate::basis::dot(self.basis.mode_row_grid(k + 1), &abs);
            }
        }
        changed
    }

    /// One full iteration map: gradient step, positivity, renormalization.
    /// The absolute-value projection is guarded: it is taken whenever it
    /// does not raise the quotient (truncating |u| to the basis can add
    /// high-mode energy), so the accepted sequence stays monotone while the
    /// iterates are pushed toward nonnegative traces.
    fn candidate(&self, c: &[Vec<f64>], dir: &[Vec<f64>], eta: f64) -> Result<(Vec<Vec<f64>>, f64)> {
        let raw: Vec<Vec<f64>> = c
            .iter()
            .zip(dir.iter())
            .map(|(ck, gk)| ck.iter().zip(gk.iter()).map(|(x, d)| x - eta * d).collect())
            .collect();
        let mut plain = raw.clone();
        self.normalize(&mut plain)?;
        let e_plain = self.energy(&plain);
        if !self.positivity {
            return Ok((plain, e_plain));
        }
        let mut projected = raw;
        if !self.positivity_project(&mut projected) {
            return Ok((plain, e_plain));
        }
        self.normalize(&mut projected)?;
        let e_proj = self.energy(&projected);
        if e_proj <= e_plain {
            Ok((projected, e_proj))
        } else {
            Ok((plain, e_plain))
        }
    }
}

fn flat_dot(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| crate::basis::dot(x, y))
        .sum()
}

/// Deterministic off-center initialization bump, projected and normalized.
fn bump_coeffs(basis: &BasisSpec, center: f64, width: f64) -> Vec<f64> {
    let samples: Vec<f64> = basis
        .grid
        .iter()
        .map(|&x| (1.0 - x * x) * (-((x - center) / width).powi(2)).exp())
        .collect();
    to_coefficients(&samples, basis).expect("grid lengths agree").coeffs().to_vec()
}

/// Zero-pad coarse coefficients to a finer truncation. The eigenbasis is
/// nested across truncations, so this is an exact embedding.
fn prolong(coarse: &[f64], modes: usize) -> Vec<f64> {
    let mut out = vec![0.0; modes];
    out[..coarse.len()].copy_from_slice(coarse);
    out
}

/// Tolerances for the coarse levels of the multilevel seed: the coarse
/// march only has to place the profile, not polish it.
fn coarse_options(opts: &SolverOptions) -> SolverOptions {
    SolverOptions {
        tol_grad: opts.tol_grad.max(1e-6),
        tol_quotient: opts.tol_quotient.max(1e-11),
        ..opts.clone()
    }
}

const COARSEST_MODES: usize = 32;

/// Cold starts on fine truncations first solve the same problem at half
/// the modes (recursively): the slow large-scale placement of the profile
/// happens where iterations are cheap, and the fine level only polishes.
fn multilevel_scalar_seed(
    config: &ProblemConfig,
    r: f64,
    opts: &SolverOptions,
) -> Option<Vec<f64>> {
    let coarse_modes = config.modes / 2;
    if coarse_modes < COARSEST_MODES {
        return None;
    }
    let coarse_cfg = ProblemConfig::new(config.s, config.alpha, coarse_modes, 0).ok()?;
    let coarse_basis = crate::basis::make_basis(&coarse_cfg).ok()?;
    let solved = minimize_scalar(&coarse_cfg, &coarse_basis, r, &coarse_options(opts), None);
    let state = match solved {
        Ok(state) => state,
        Err(Error::NotConverged { state, .. }) => *state,
        Err(_) => return None,
    };
    Some(prolong(state.u.coeffs(), config.modes))
}

fn multilevel_system_seed(
    config: &ProblemConfig,
    exp: &ExponentConfig,
    opts: &SolverOptions,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let coarse_modes = config.modes / 2;
    if coarse_modes < COARSEST_MODES {
        return None;
    }
    let coarse_cfg = ProblemConfig::new(config.s, config.alpha, coarse_modes, 0).ok()?;
    let coarse_basis = crate::basis::make_basis(&coarse_cfg).ok()?;
    let solved = minimize_system(&coarse_cfg, &coarse_basis, exp, &coarse_options(opts), None);
    let state = match solved {
        Ok(state) => state,
        Err(Error::NotConverged { state, .. }) => *state,
        Err(_) => return None,
    };
    let v = state.v.as_ref()?;
    Some((
        prolong(state.u.coeffs(), config.modes),
        prolong(v.coeffs(), config.modes),
    ))
}

struct SolveOutcome {
    c: Vec<Vec<f64>>,
    quotient: f64,
    iterations: usize,
    grad_norm: f64,
    converged: bool,
}

fn descend(
    engine: &Engine,
    mut c: Vec<Vec<f64>>,
    opts: &SolverOptions,
    mut history: Option<&mut Vec<f64>>,
) -> Result<SolveOutcome> {
    let trace = std::env::var("HENON_SOLVER_TRACE").is_ok();
    let mut trials_total = 0usize;
    engine.normalize(&mut c)?;
    let mut e = engine.energy(&c);
    if let Some(h) = history.as_deref_mut() {
        h.push(e);
    }
    let mut eta = opts.step_init;
    let mut prev: Option<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = None;
    let mut last_drop = f64::INFINITY;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..opts.max_iters {
        iterations = it + 1;
        let gt = engine.t_gradient(&c);
        let ge: Vec<Vec<f64>> = c
            .iter()
            .map(|ck| {
                ck.iter()
                    .zip(engine.lam_s.iter())
                    .map(|(x, l)| 2.0 * x * l)
                    .collect()
            })
            .collect();
        // preconditioned tangent direction d = P (grad E - mu grad T) with
        // mu making d orthogonal to grad T
        let pe: Vec<Vec<f64>> = ge
            .iter()
            .map(|gk| gk.iter().zip(engine.precond.iter()).map(|(x, p)| x * p).collect())
            .collect();
        let pt: Vec<Vec<f64>> = gt
            .iter()
            .map(|gk| gk.iter().zip(engine.precond.iter()).map(|(x, p)| x * p).collect())
            .collect();
        let tpt = flat_dot(&gt, &pt);
        let mu = if tpt > 0.0 { flat_dot(&gt, &pe) / tpt } else { 0.0 };
        let dir: Vec<Vec<f64>> = pe
            .iter()
            .zip(pt.iter())
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x - mu * y).collect())
            .collect();
        // decrease rate <grad E, d> = |proj grad|^2 in the P metric
        let slope = flat_dot(&ge, &dir).max(0.0);
        grad_norm = slope.sqrt();

        if grad_norm <= opts.tol_grad * e.max(1.0) && last_drop <= opts.tol_quotient {
            converged = true;
            break;
        }

        // Barzilai-Borwein trial step from the previous iterate
        if let Some((pc, pd)) = &prev {
            let mut sy = 0.0;
            let mut ss = 0.0;
            for ((ck, pck), (dk, pdk)) in c.iter().zip(pc).zip(dir.iter().zip(pd)) {
                for i in 0..ck.len() {
                    let ds = ck[i] - pck[i];
                    let dd = dk[i] - pdk[i];
                    sy += ds * dd;
                    ss += ds * ds;
                }
            }
            if sy > 0.0 && ss > 0.0 {
                eta = (ss / sy).clamp(1e-10, 1e4);
            } else {
                eta = (eta * 2.0).min(1e2);
            }
        }

        // monotone Armijo backtracking on the quotient
        let mut accepted = None;
        let mut trial = eta;
        for _ in 0..60 {
            trials_total += 1;
            let (cand, e_new) = engine.candidate(&c, &dir, trial)?;
            if !e_new.is_finite() {
                return Err(Error::Numerical(format!("quotient became {e_new}")));
            }
            if e_new <= e - 1e-4 * trial * slope {
                accepted = Some((cand, e_new));
                break;
            }
            trial *= opts.backtrack;
            if trial < 1e-18 {
                break;
            }
        }
        let Some((cand, e_new)) = accepted else {
            // no step survives the renormalization map; the iterate is as
            // stationary as this resolution allows
            converged = grad_norm <= 1e3 * opts.tol_grad * e.max(1.0);
            break;
        };
        eta = trial;
        last_drop = (e - e_new) / e.max(f64::MIN_POSITIVE);
        if trace && it % 250 == 0 {
            eprintln!(
                "    it {it}: e {e:.12}, grad {grad_norm:.3e}, eta {eta:.3e}, drop {last_drop:.3e}, trials {trials_total}"
            );
        }
        prev = Some((std::mem::take(&mut c), dir));
        c = cand;
        e = e_new;
        if let Some(h) = history.as_deref_mut() {
            h.push(e);
        }
        if !e.is_finite() {
            return Err(Error::Numerical("quotient lost finiteness".into()));
        }
    }

    Ok(SolveOutcome {
        c,
        quotient: e,
        iterations,
        grad_norm,
        converged,
    })
}

fn build_state(
    outcome: SolveOutcome,
    config: &ProblemConfig,
    basis: &BasisSpec,
    p: f64,
    q: f64,
) -> Result<GroundState> {
    let sum = p + q;
    let quotient = outcome.quotient;
    let multiplier = quotient / sum;
    // The system equation carries the 2p/(p+q) factors, the scalar one has
    // coefficient 1, so their rescaling exponents differ by a factor 2:
    // beta^{p+q-2} = (p+q) lambda / 2 (system), beta^{r-2} = r lambda (scalar).
    let beta = if q == 0.0 {
        (sum * multiplier).powf(1.0 / (sum - 2.0))
    } else {
        (sum * multiplier / 2.0).powf(1.0 / (sum - 2.0))
    };
    let mut fields = outcome.c.into_iter();
    let u = SpectralField::from_coeffs(fields.next().unwrap());
    let v = fields.next().map(SpectralField::from_coeffs);
    let tail = tail_energy_fraction(&u, config.s, basis)?;
    let mut state = GroundState {
        u,
        v,
        quotient,
        multiplier,
        beta,
        converged: outcome.converged,
        iterations: outcome.iterations,
        residual_norm: f64::NAN,
        tail_fraction: tail,
        s: config.s,
        alpha: config.alpha,
        p,
        q,
    };
    state.residual_norm = residual(&state, basis)?;
    if !state.converged {
        return Err(Error::NotConverged {
            iterations: state.iterations,
            grad_norm: outcome.grad_norm,
            state: Box::new(state),
        });
    }
    Ok(state)
}

/// Minimize the scalar quotient at exponent r. `init` seeds warm starts.
pub fn minimize_scalar(
    config: &ProblemConfig,
    basis: &BasisSpec,
    r: f64,
    opts: &SolverOptions,
    init: Option<&SpectralField>,
) -> Result<GroundState> {
    opts.validate()?;
    let crit = config.crit_exp();
    if r <= 2.0 {
        return Err(Error::InvalidConfig(format!("need r > 2, got {r}")));
    }
    if r >= crit && !opts.critical_mode {
        return Err(Error::CriticalExponent { sum: r, crit });
    }
    let engine = Engine::new(basis, Objective::Scalar { r }, config.alpha, config.s, opts.positivity);
    let c0 = match init {
        Some(f) => vec![f.coeffs().to_vec()],
        None => match multilevel_scalar_seed(config, r, opts) {
            Some(seed) => vec![seed],
            None => vec![bump_coeffs(basis, opts.bump_center, opts.bump_width)],
        },
    };
    let outcome = descend(&engine, c0, opts, None)?;
    build_state(outcome, config, basis, r, 0.0)
}

/// Minimize the system quotient on {int |x|^a |u|^p |v|^q = 1}.
pub fn minimize_system(
    config: &ProblemConfig,
    basis: &BasisSpec,
    exp: &ExponentConfig,
    opts: &SolverOptions,
    init: Option<(&SpectralField, &SpectralField)>,
) -> Result<GroundState> {
    opts.validate()?;
    let crit = config.crit_exp();
    let sum = exp.sum();
    if sum <= 2.0 {
        return Err(Error::InvalidConfig(format!("need p+q > 2, got {sum}")));
    }
    if sum >= crit && !opts.critical_mode {
        return Err(Error::CriticalExponent { sum, crit });
    }
    let engine = Engine::new(
        basis,
        Objective::System { p: exp.p, q: exp.q },
        config.alpha,
        config.s,
        opts.positivity,
    );
    let c0 = match init {
        Some((u, v)) => vec![u.coeffs().to_vec(), v.coeffs().to_vec()],
        None => match multilevel_system_seed(config, exp, opts) {
            Some((u, v)) => vec![u, v],
            None => {
                let b = bump_coeffs(basis, opts.bump_center, opts.bump_width);
                vec![b.clone(), b]
            }
        },
    };
    let outcome = descend(&engine, c0, opts, None)?;
    build_state(outcome, config, basis, exp.p, exp.q)
}

/// Build the system minimizer (B w0, C w0) from a scalar minimizer at
/// r = p + q, with B/C = sqrt(p/q) and the system constraint equal to 1.
/// Its quotient is exactly C_{p,q} times the scalar quotient.
pub fn synthesize_system_from_scalar(
    w0: &GroundState,
    exp: &ExponentConfig,
    basis: &BasisSpec,
) -> Result<GroundState> {
    if !w0.is_scalar() {
        return Err(Error::InvalidConfig("expected a scalar ground state".into()));
    }
    let (p, q) = (exp.p, exp.q);
    let sum = p + q;
    let big_c = (q / p).powf(p / (2.0 * sum));
    let big_b = (p / q).sqrt() * big_c;
    let u = w0.u.scaled(big_b);
    let v = w0.u.scaled(big_c);
    let quotient = cpq(p, q) * w0.quotient;
    let multiplier = quotient / sum;
    let beta = (sum * multiplier / 2.0).powf(1.0 / (sum - 2.0));
    let tail = w0.tail_fraction;
    let mut state = GroundState {
        u,
        v: Some(v),
        quotient,
        multiplier,
        beta,
        converged: w0.converged,
        iterations: w0.iterations,
        residual_norm: f64::NAN,
        tail_fraction: tail,
        s: w0.s,
        alpha: w0.alpha,
        p,
        q,
    };
    state.residual_norm = residual(&state, basis)?;
    Ok(state)
}

/// Scale a constrained minimizer by beta so it solves the equation in weak
/// form. Idempotent: the rescaled state has multiplier 2/(p+q) (systems) or
/// 1/r (scalar) and beta 1.
pub fn lagrange_rescale(state: &GroundState, basis: &BasisSpec) -> Result<GroundState> {
    let beta = state.beta;
    let sum = state.exponent_sum();
    let rescaled_multiplier = if state.is_scalar() { 1.0 / sum } else { 2.0 / sum };
    let mut out = GroundState {
        u: state.u.scaled(beta),
        v: state.v.as_ref().map(|v| v.scaled(beta)),
        quotient: state.quotient,
        multiplier: rescaled_multiplier,
        beta: 1.0,
        converged: state.converged,
        iterations: state.iterations,
        residual_norm: f64::NAN,
        tail_fraction: state.tail_fraction,
        s: state.s,
        alpha: state.alpha,
        p: state.p,
        q: state.q,
    };
    out.residual_norm = residual(&out, basis)?;
    Ok(out)
}

/// Relative coefficient-space residual of the Euler-Lagrange system:
/// ||(-Delta)^s w - RHS|| / ||(-Delta)^s w||, RHS projected onto the basis.
/// System RHS carries the 2p/(p+q) factors; the scalar equation has
/// coefficient one.
pub fn residual(state: &GroundState, basis: &BasisSpec) -> Result<f64> {
    let s = state.s;
    let xa = henon_factor(state.alpha, basis);
    let lam_s: Vec<f64> = basis.eigenvalues.iter().map(|l| l.powf(s)).collect();

    let mut lhs_sq = 0.0;
    let mut res_sq = 0.0;
    match &state.v {
        None => {
            let r = state.p;
            let ws = basis.synth_quad(state.u.coeffs());
            let rhs: Vec<f64> = ws
                .iter()
                .zip(xa.iter())
                .map(|(&u, &a)| a * u.signum() * u.abs().powf(r - 1.0))
                .collect();
            let proj = basis.project_quad(&rhs);
            for ((c, l), pr) in state.u.coeffs().iter().zip(lam_s.iter()).zip(proj.iter()) {
                let lhs = c * l;
                lhs_sq += lhs * lhs;
                res_sq += (lhs - pr) * (lhs - pr);
            }
        }
        Some(v) => {
            let (p, q) = (state.p, state.q);
            let sum = p + q;
            let us = basis.synth_quad(state.u.coeffs());
            let vs = basis.synth_quad(v.coeffs());
            let (gu, gv) = t_gradient_samples(&us, &vs, p, q, &xa);
            // dT/du = p |x|^a u^{p-1} v^q; the equation RHS is 2p/(p+q) ...
            let pu = basis.project_quad(&gu);
            let pv = basis.project_quad(&gv);
            for ((c, l), pr) in state.u.coeffs().iter().zip(lam_s.iter()).zip(pu.iter()) {
                let lhs = c * l;
                let rhs = 2.0 / sum * pr;
                lhs_sq += lhs * lhs;
                res_sq += (lhs - rhs) * (lhs - rhs);
            }
            for ((c, l), pr) in v.coeffs().iter().zip(lam_s.iter()).zip(pv.iter()) {
                let lhs = c * l;
                let rhs = 2.0 / sum * pr;
                lhs_sq += lhs * lhs;
                res_sq += (lhs - rhs) * (lhs - rhs);
            }
        }
    }
    if lhs_sq == 0.0 {
        return Ok(0.0);
    }
    Ok((res_sq / lhs_sq).sqrt())
}
