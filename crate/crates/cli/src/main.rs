//! Batch front end: ground-state solves, exponent sweeps and verification
//! reports for the fractional Henon laboratory.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::CmdError;
use crate::config::RunConfig;
use crate::manifest::ManifestBuilder;

const CONFIG_HELP: &str = "\
CONFIG is a single JSON document. Keys and defaults:
  s        (required) fractional order, 0 < s < 1/2 for solves
  modes    (required) eigenbasis truncation M >= 8
  alpha    [0.0]      Henon weight exponent
  grid     [4*modes]  physical sample count
  p, q                system exponents (solve, identity)
  solver   { max_iters [20000], tol_grad [3e-7], tol_quotient [1e-12],
             step_init [0.5], backtrack [0.5], bump_center [0.5],
             bump_width [0.25], positivity [true], critical_mode [false] }
  sweep    { q, p_list, warm_start [true], near_critical_gap [0.2],
             near_critical_iter_factor [2.0] }
  bubble   { eps0 [0.05], halvings [7] }

Exit codes: 0 success, 1 configuration error, 2 non-convergence or a failed
mandatory invariant, 3 numerical failure.

HENON_THREADS caps parallelism for cold-started sweeps (warm-started sweeps
are inherently sequential).";

#[derive(Parser)]
#[command(
    name = "henon",
    version,
    about = "Ground states of fractional Henon systems on the interval",
    after_long_help = CONFIG_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one system minimization and rescale it to a weak solution
    Solve(RunArgs),
    /// Run an exponent sweep and emit the concentration diagnostics CSV
    Sweep(RunArgs),
    /// Dual-solve check of the scalar/system identity
    Identity(RunArgs),
    /// Truncated-bubble family and the extrapolated critical constant
    Bubble(RunArgs),
    /// Extension isometry and Dirichlet-to-Neumann verification
    ExtensionCheck(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Path to the JSON run configuration
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args, runner): (
        &str,
        &RunArgs,
        fn(&RunConfig, &std::path::Path, &mut ManifestBuilder) -> Result<(), CmdError>,
    ) = match &cli.command {
        Command::Solve(a) => ("solve", a, commands::cmd_solve),
        Command::Sweep(a) => ("sweep", a, commands::cmd_sweep),
        Command::Identity(a) => ("identity", a, commands::cmd_identity),
        Command::Bubble(a) => ("bubble", a, commands::cmd_bubble),
        Command::ExtensionCheck(a) => ("extension-check", a, commands::cmd_extension_check),
    };

    let cfg = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create output directory: {e}");
        return ExitCode::from(1);
    }

    let mut manifest = ManifestBuilder::new(name, &args.out);
    let status = match runner(&cfg, &args.out, &mut manifest) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    };
    if let Err(e) = manifest.finish(&cfg, status) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(if status == 0 { 1 } else { status as u8 });
    }
    ExitCode::from(status as u8)
}
