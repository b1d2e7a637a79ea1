//! `spooflab` — deterministic experiment runner for the surface-aided
//! spoofing lab. Every verb writes a CSV whose bytes depend only on
//! the config file, the seed, and the flags.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use spooflab_cli::config::FileConfig;
use spooflab_cli::experiments::{
    compute_delta_diff, default_delta_grid, default_scan_grid, parse_kind, run_angle_diff_sweep,
    run_aoa_scan, run_gamma_sweep, run_single_solve, run_validation, write_checks_csv,
    write_scan_csv, write_solve_csv, write_sweep_csv, GAMMA_GRID_DEFAULT,
};
use spooflab_core::BaselineKind;

#[derive(Debug, Parser)]
#[command(
    name = "spooflab",
    version,
    about = "Experiment runner for surface-aided radar spoofing studies"
)]
struct Cli {
    /// TOML config file; omitted fields fall back to the reference scenario.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Base seed for every random draw in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output CSV path; each verb has a default name in the working directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Scan the receive spectrum for each surface baseline.
    ScanAoa(ScanAoaArgs),
    /// Sweep the spoof-power cap and solve with both designers.
    SweepGamma(SweepGammaArgs),
    /// Sweep the radar/clutter angular separation seen from the surface.
    SweepDelta(SweepDeltaArgs),
    /// Solve one design problem and dump the element phases.
    Solve(SolveArgs),
    /// Run fast numerical self-checks; exits nonzero if any fails.
    Validate,
}

#[derive(Debug, Args)]
struct ScanAoaArgs {
    /// Transmission epochs to average the spatial covariance over.
    #[arg(long)]
    epochs: Option<usize>,

    /// Baselines to scan (default: all four).
    #[arg(long, value_delimiter = ',')]
    kinds: Vec<String>,
}

#[derive(Debug, Args)]
struct SweepGammaArgs {
    /// Cap values in mW (default: a five-point log grid around the reference cap).
    #[arg(long, value_delimiter = ',')]
    gammas: Vec<f64>,

    /// Designs to sweep (default: optimized_mm,optimized_sdr).
    #[arg(long, value_delimiter = ',')]
    kinds: Vec<String>,
}

#[derive(Debug, Args)]
struct SweepDeltaArgs {
    /// Angle differences in degrees (default: 5 to 85 in steps of 5).
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Which designer to run: mm or sdr.
    #[arg(long, default_value = "mm")]
    solver: String,

    /// Spoof-power cap in mW (default: the scenario threshold).
    #[arg(long)]
    gamma: Option<f64>,
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        Some(p) => FileConfig::from_path(p),
        None => Ok(FileConfig::default()),
    }
}

fn open_out(out: &Option<PathBuf>, default_name: &str) -> Result<(BufWriter<File>, PathBuf)> {
    let path = out.clone().unwrap_or_else(|| PathBuf::from(default_name));
    let file = File::create(&path)
        .with_context(|| format!("cannot create output file {}", path.display()))?;
    Ok((BufWriter::new(file), path))
}

fn base_metadata(cli: &Cli) -> Vec<(&'static str, String)> {
    let config = cli
        .config
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "(reference scenario)".to_string());
    vec![("config", config), ("seed", cli.seed.to_string())]
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let file_config = load_config(&cli.config)?;
    let scenario = file_config.scenario()?;
    let mut meta = base_metadata(cli);

    match &cli.verb {
        Verb::ScanAoa(args) => {
            let epochs = args.epochs.unwrap_or_else(|| file_config.epochs());
            let kinds: Vec<BaselineKind> = if args.kinds.is_empty() {
                BaselineKind::all().to_vec()
            } else {
                args.kinds
                    .iter()
                    .map(|name| parse_kind(name))
                    .collect::<Result<_>>()?
            };
            let grid = default_scan_grid();
            let target_rcs = file_config.target_rcs();
            meta.push(("verb", "scan-aoa".to_string()));
            meta.push(("epochs", epochs.to_string()));
            meta.push(("target_rcs_m2", format!("{target_rcs:.6e}")));
            let rows = run_aoa_scan(&scenario, &kinds, cli.seed, epochs, target_rcs, &grid);
            let (mut out, path) = open_out(&cli.out, "scan_aoa.csv")?;
            write_scan_csv(&mut out, &rows, &meta)?;
            out.flush()?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
            Ok(0)
        }
        Verb::SweepGamma(args) => {
            let gammas: Vec<f64> = if args.gammas.is_empty() {
                GAMMA_GRID_DEFAULT.to_vec()
            } else {
                args.gammas.clone()
            };
            let kinds: Vec<BaselineKind> = if args.kinds.is_empty() {
                vec![BaselineKind::OptimizedMm, BaselineKind::OptimizedSdr]
            } else {
                args.kinds
                    .iter()
                    .map(|name| parse_kind(name))
                    .collect::<Result<_>>()?
            };
            meta.push(("verb", "sweep-gamma".to_string()));
            let rows = run_gamma_sweep(&scenario, &gammas, &kinds, cli.seed)?;
            let (mut out, path) = open_out(&cli.out, "sweep_gamma.csv")?;
            write_sweep_csv(&mut out, &rows, &meta)?;
            out.flush()?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
            Ok(0)
        }
        Verb::SweepDelta(args) => {
            let deltas = if args.deltas.is_empty() {
                default_delta_grid()
            } else {
                args.deltas.clone()
            };
            meta.push(("verb", "sweep-delta".to_string()));
            if let Ok(delta0) = compute_delta_diff(&scenario) {
                meta.push(("reference_delta_deg", format!("{delta0:.3}")));
            }
            let (layout, rows) = run_angle_diff_sweep(&scenario, &deltas, cli.seed)?;
            meta.push((
                "layout",
                format!(
                    "radar ({:.3}, {:.3}) m, surface ({:.3}, {:.3}) m, clutter line z = {:.3} m",
                    layout.radar_position[0],
                    layout.radar_position[1],
                    layout.target_position[0],
                    layout.target_position[1],
                    layout.clutter_position[1],
                ),
            ));
            let (mut out, path) = open_out(&cli.out, "sweep_delta.csv")?;
            write_sweep_csv(&mut out, &rows, &meta)?;
            out.flush()?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
            Ok(0)
        }
        Verb::Solve(args) => {
            meta.push(("verb", "solve".to_string()));
            let summary = run_single_solve(&scenario, &args.solver, args.gamma, cli.seed)?;
            let (mut out, path) = open_out(&cli.out, "solve.csv")?;
            write_solve_csv(&mut out, &summary, &meta)?;
            out.flush()?;
            eprintln!(
                "{}: clutter-bearing power {:.6e} mW, spoof-path power {:.6e} mW ({} iterations, converged: {}); wrote {}",
                summary.solver,
                summary.p_clutter_mw,
                summary.p_target_mw,
                summary.iterations,
                summary.converged,
                path.display()
            );
            Ok(0)
        }
        Verb::Validate => {
            meta.push(("verb", "validate".to_string()));
            let checks = run_validation(&scenario, cli.seed);
            let (mut out, path) = open_out(&cli.out, "validate.csv")?;
            write_checks_csv(&mut out, &checks, &meta)?;
            out.flush()?;
            let mut failed = 0;
            for check in &checks {
                let status = if check.passed { "PASS" } else { "FAIL" };
                eprintln!("[{status}] {}: {}", check.check, check.detail);
                if !check.passed {
                    failed += 1;
                }
            }
            eprintln!(
                "{} of {} checks passed; wrote {}",
                checks.len() - failed,
                checks.len(),
                path.display()
            );
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}
