//! The five batch commands. Each writes its artifacts into the output
//! directory; the caller records them in the manifest.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use henon_core::asymptotics::{
    criticality_limit_check, diagnostics, identity_check, profile_convergence, run_sweep,
    SweepPlan, SweepRecord,
};
use henon_core::basis::{make_basis, BasisSpec};
use henon_core::bubbles::{sobolev_constant_estimate, SobolevOptions};
use henon_core::energy::ExponentConfig;
use henon_core::error::Error as CoreError;
use henon_core::extension::{
    cylinder_energy, ks_constant, neumann_limit, theta_profile, ExtensionProfile,
};
use henon_core::field::{frac_laplacian, hs_norm_sq, SpectralField};
use henon_core::solver::{lagrange_rescale, minimize_system};

use crate::config::RunConfig;
use crate::manifest::ManifestBuilder;

/// Command failure with its exit-code class.
#[derive(Debug)]
pub enum CmdError {
    /// exit 1
    Config(String),
    /// exit 2
    NotConverged(String),
    /// exit 2
    InvariantFailed(String),
    /// exit 3
    Numerical(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 1,
            CmdError::NotConverged(_) | CmdError::InvariantFailed(_) => 2,
            CmdError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Config(m)
            | CmdError::NotConverged(m)
            | CmdError::InvariantFailed(m)
            | CmdError::Numerical(m) => m,
        }
    }
}

fn classify(e: CoreError) -> CmdError {
    match e {
        CoreError::InvalidConfig(_)
        | CoreError::UnsupportedDimension(_)
        | CoreError::DimensionMismatch { .. }
        | CoreError::NonIntegrablePower { .. }
        | CoreError::CriticalExponent { .. } => CmdError::Config(e.to_string()),
        CoreError::NotConverged { .. } => CmdError::NotConverged(e.to_string()),
        _ => CmdError::Numerical(e.to_string()),
    }
}

fn write_json<T: Serialize>(
    out_dir: &Path,
    name: &str,
    value: &T,
    manifest: &mut ManifestBuilder,
) -> Result<(), CmdError> {
    let path = out_dir.join(name);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CmdError::Numerical(format!("serialization failed: {e}")))?;
    std::fs::write(&path, text)
        .map_err(|e| CmdError::Config(format!("cannot write {}: {e}", path.display())))?;
    manifest.add_file(name);
    Ok(())
}

fn require_pq(cfg: &RunConfig) -> Result<ExponentConfig, CmdError> {
    let p = cfg
        .p
        .ok_or_else(|| CmdError::Config("missing key `p` in config".into()))?;
    let q = cfg
        .q
        .ok_or_else(|| CmdError::Config("missing key `q` in config".into()))?;
    ExponentConfig::new(p, q).map_err(classify)
}

/// solve: minimize the system quotient, rescale to a weak solution, write
/// the solution coefficients and a diagnostics record.
pub fn cmd_solve(
    cfg: &RunConfig,
    out_dir: &Path,
    manifest: &mut ManifestBuilder,
) -> Result<(), CmdError> {
    let problem = cfg.problem().map_err(classify)?;
    let exp = require_pq(cfg)?;
    let basis = make_basis(&problem).map_err(classify)?;
    let opts = cfg.solver.to_options();
    let state = minimize_system(&problem, &basis, &exp, &opts, None).map_err(classify)?;
    let solved = lagrange_rescale(&state, &basis).map_err(classify)?;
    let profile = theta_profile(problem.s).map_err(classify)?;
    let record = diagnostics(&state, &problem, &basis, &profile).map_err(classify)?;
    if !record.max_principle_ok {
        manifest.warn("extension samples exceeded the trace maximum");
    }

    let solution = json!({
        "p": exp.p,
        "q": exp.q,
        "s": problem.s,
        "alpha": problem.alpha,
        "modes": problem.modes,
        "grid": problem.grid,
        "quotient": state.quotient,
        "multiplier": state.multiplier,
        "beta": state.beta,
        "iterations": state.iterations,
        "converged": state.converged,
        "residual_constrained": state.residual_norm,
        "residual_rescaled": solved.residual_norm,
        "tail_fraction": state.tail_fraction,
        "u_coeffs": solved.u.coeffs(),
        "v_coeffs": solved.v.as_ref().map(|v| v.coeffs().to_vec()),
    });
    write_json(out_dir, "solution.json", &solution, manifest)?;
    write_json(out_dir, "diagnostics.json", &record, manifest)?;
    if solved.residual_norm > 1e-6 {
        manifest.warn(&format!(
            "rescaled residual {:.3e} above 1e-6",
            solved.residual_norm
        ));
    }
    Ok(())
}

fn format_f64(v: f64) -> String {
    format!("{v}")
}

/// The pinned CSV schema.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(
        "p_eps,q,quotient,multiplier,M1,M2,ratio,x_max,d_eps,lambda_eps,d_over_lambda,h_eps,remainder_rel,amp_ratio_fit,iterations,converged\n",
    );
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            format_f64(r.p_eps),
            format_f64(r.q),
            format_f64(r.quotient),
            format_f64(r.multiplier),
            format_f64(r.m1),
            format_f64(r.m2),
            format_f64(r.ratio),
            format_f64(r.x_max),
            format_f64(r.d_eps),
            format_f64(r.lambda_eps),
            format_f64(r.d_over_lambda),
            format_f64(r.h_eps),
            format_f64(r.remainder_rel),
            format_f64(r.amp_ratio_fit),
            r.iterations,
            r.converged
        );
    }
    out
}

/// sweep: run the exponent sweep, emit the CSV and the criticality and
/// profile reports.
pub fn cmd_sweep(
    cfg: &RunConfig,
    out_dir: &Path,
    manifest: &mut ManifestBuilder,
) -> Result<(), CmdError> {
    let problem = cfg.problem().map_err(classify)?;
    let sweep_cfg = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CmdError::Config("missing `sweep` section in config".into()))?;
    let mut plan = SweepPlan::new(problem.clone(), sweep_cfg.q, sweep_cfg.p_list.clone());
    plan.warm_start = sweep_cfg.warm_start;
    plan.options = cfg.solver.to_options();
    plan.near_critical_gap = sweep_cfg.near_critical_gap;
    plan.near_critical_iter_factor = sweep_cfg.near_critical_iter_factor;
    plan.threads = std::env::var("HENON_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);
    plan.validate().map_err(classify)?;

    let outcome = run_sweep(&plan).map_err(classify)?;
    let unconverged = outcome.records.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        manifest.warn(&format!("{unconverged} sweep point(s) did not converge"));
    }

    let csv = sweep_csv(&outcome.records);
    std::fs::write(out_dir.join("sweep.csv"), csv)
        .map_err(|e| CmdError::Config(format!("cannot write sweep.csv: {e}")))?;
    manifest.add_file("sweep.csv");

    // the critical-limit comparison uses the alpha = 0 bubble estimate
    let bubble_cfg = cfg.bubble.clone().unwrap_or_default();
    let cfg0 = henon_core::config::ProblemConfig::new(problem.s, 0.0, problem.modes, problem.grid)
        .map_err(classify)?;
    let basis0 = make_basis(&cfg0).map_err(classify)?;
    let sobolev = sobolev_constant_estimate(
        &cfg0,
        &basis0,
        &SobolevOptions {
            eps0: bubble_cfg.eps0,
            halvings: bubble_cfg.halvings,
        },
    );
    let criticality = match &sobolev {
        Ok(est) => match criticality_limit_check(&outcome.records, est.s_hat) {
            Ok(rep) => Some(rep),
            Err(e) => {
                manifest.warn(&format!("criticality check skipped: {e}"));
                None
            }
        },
        Err(e) => {
            manifest.warn(&format!("bubble estimate failed: {e}"));
            None
        }
    };
    let profiles = match profile_convergence(&outcome.states, &outcome.records, &problem) {
        Ok(rep) => Some(rep),
        Err(e) => {
            manifest.warn(&format!("profile convergence skipped: {e}"));
            None
        }
    };

    let report = json!({
        "s_hat": sobolev.as_ref().ok().map(|e| e.s_hat),
        "bubble_quotients": sobolev.as_ref().ok().map(|e| e.quotients.clone()),
        "bubble_eps": sobolev.as_ref().ok().map(|e| e.eps_values.clone()),
        "criticality": criticality,
        "profiles": profiles,
    });
    write_json(out_dir, "sweep_report.json", &report, manifest)?;
    Ok(())
}

/// identity: dual solve of the scalar and system problems and the
/// C_{p,q} identity check.
pub fn cmd_identity(
    cfg: &RunConfig,
    out_dir: &Path,
    manifest: &mut ManifestBuilder,
) -> Result<(), CmdError> {
    let problem = cfg.problem().map_err(classify)?;
    let exp = require_pq(cfg)?;
    let basis = make_basis(&problem).map_err(classify)?;
    let opts = cfg.solver.to_options();
    let report = identity_check(&problem, &basis, &exp, &opts).map_err(classify)?;
    let deviation_ok = report.deviation <= 1e-3;
    let uv_ok = report.uv_max_deviation <= 0.01;
    let doc = json!({
        "report": report,
        "checks": {
            "identity_deviation_le_1e-3": deviation_ok,
            "uv_ratio_within_1_percent": uv_ok,
        }
    });
    write_json(out_dir, "identity.json", &doc, manifest)?;
    if !(deviation_ok && uv_ok) {
        return Err(CmdError::InvariantFailed(format!(
            "identity check failed: deviation {:.3e}, u/v deviation {:.3e}",
            report.deviation, report.uv_max_deviation
        )));
    }
    Ok(())
}

/// bubble: truncated-bubble family quotients and the extrapolated critical
/// constant.
pub fn cmd_bubble(
    cfg: &RunConfig,
    out_dir: &Path,
    manifest: &mut ManifestBuilder,
) -> Result<(), CmdError> {
    let problem = cfg.problem().map_err(classify)?;
    if problem.alpha != 0.0 {
        manifest.warn("bubble estimate is defined at alpha = 0; ignoring configured alpha");
    }
    let cfg0 = henon_core::config::ProblemConfig::new(problem.s, 0.0, problem.modes, problem.grid)
        .map_err(classify)?;
    let basis = make_basis(&cfg0).map_err(classify)?;
    let section = cfg.bubble.clone().unwrap_or_default();
    let est = sobolev_constant_estimate(
        &cfg0,
        &basis,
        &SobolevOptions {
            eps0: section.eps0,
            halvings: section.halvings,
        },
    )
    .map_err(classify)?;
    let monotone = est.quotients[1..].windows(2).all(|w| w[1] < w[0]);
    let positive = est.s_hat > 0.0;
    let doc = json!({
        "eps": est.eps_values,
        "quotients": est.quotients,
        "tail_fractions": est.tail_fractions,
        "s_hat": est.s_hat,
        "checks": {
            "quotients_monotone_decreasing": monotone,
            "s_hat_positive": positive,
        }
    });
    write_json(out_dir, "bubble.json", &doc, manifest)?;
    if !(monotone && positive) {
        return Err(CmdError::InvariantFailed(
            "bubble quotient sequence failed its invariants".into(),
        ));
    }
    Ok(())
}

/// Deterministic pseudo-random coefficients (xorshift) for the extension
/// spot checks.
fn test_field(modes: usize, seed: u64) -> SpectralField {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).max(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    SpectralField::from_coeffs((0..modes).map(|_| next()).collect())
}

fn isometry_defect(profile: &ExtensionProfile, basis: &BasisSpec, field: &SpectralField) -> f64 {
    let e = cylinder_energy(field, profile, basis).expect("dimensions agree");
    let hs = hs_norm_sq(field, profile.s, basis).expect("dimensions agree");
    ((e - hs) / hs).abs()
}

/// extension-check: the isometry, Dirichlet-to-Neumann recovery and the
/// closed forms at s = 1/2.
pub fn cmd_extension_check(
    cfg: &RunConfig,
    out_dir: &Path,
    manifest: &mut ManifestBuilder,
) -> Result<(), CmdError> {
    if !(cfg.s > 0.0 && cfg.s < 1.0) {
        return Err(CmdError::Config(format!(
            "extension check needs s in (0,1), got {}",
            cfg.s
        )));
    }
    if cfg.modes < 8 {
        return Err(CmdError::Config("extension check needs modes >= 8".into()));
    }
    let basis = BasisSpec::new(cfg.modes, cfg.grid.max(4 * cfg.modes));
    let profile = theta_profile(cfg.s).map_err(classify)?;

    let norm_defect = ((profile.norm_integral - profile.ks) / profile.ks).abs();

    let mut isometry_worst = 0.0f64;
    for seed in 0..20u64 {
        let f = test_field(cfg.modes, seed + 1);
        isometry_worst = isometry_worst.max(isometry_defect(&profile, &basis, &f));
    }

    let ones = SpectralField::from_coeffs(vec![1.0; cfg.modes]);
    let nl = neumann_limit(&ones, &profile, &basis).map_err(classify)?;
    let frac = frac_laplacian(&ones, cfg.s, &basis).map_err(classify)?;
    let mut neumann_worst = 0.0f64;
    for (a, b) in nl.coeffs().iter().zip(frac.coeffs()) {
        neumann_worst = neumann_worst.max(((a - b) / b).abs());
    }

    let mut half_closed_form: Option<f64> = None;
    if (cfg.s - 0.5).abs() < 1e-12 {
        let table = profile.theta_table();
        let mut worst = 0.0f64;
        for (&z, t) in profile.z_grid().iter().zip(table.iter()) {
            worst = worst.max((t - (-z).exp()).abs() / (-z).exp().max(1e-300));
        }
        worst = worst.max((ks_constant(0.5) - 1.0).abs());
        worst = worst.max((profile.norm_integral - 1.0).abs());
        half_closed_form = Some(worst);
    }

    let isometry_ok = isometry_worst < 1e-6;
    let neumann_ok = neumann_worst < 0.01;
    let norm_ok = norm_defect < 1e-6;
    let half_ok = half_closed_form.is_none_or(|w| w < 1e-8);

    let doc = json!({
        "s": cfg.s,
        "ks": profile.ks,
        "norm_integral": profile.norm_integral,
        "norm_relative_defect": norm_defect,
        "isometry_worst_defect": isometry_worst,
        "neumann_worst_mode_error": neumann_worst,
        "half_closed_form_worst": half_closed_form,
        "checks": {
            "isometry_below_1e-6": isometry_ok,
            "neumann_below_1_percent": neumann_ok,
            "normalization_below_1e-6": norm_ok,
            "half_closed_forms_below_1e-8": half_ok,
        }
    });
    write_json(out_dir, "extension.json", &doc, manifest)?;
    if !(isometry_ok && neumann_ok && norm_ok && half_ok) {
        return Err(CmdError::InvariantFailed(
            "extension invariants failed".into(),
        ));
    }
    Ok(())
}
