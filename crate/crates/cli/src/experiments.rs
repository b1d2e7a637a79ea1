//! The three reference experiments as deterministic sweep runners, a
//! single-shot solver, and a self-check — everything the CLI verbs do,
//! exposed as a library so tests can drive it without a subprocess.
//!
//! Runners compute; writers format. All CSV numbers use fixed
//! formatting so a given config and seed always produce byte-identical
//! files.

use std::f64::consts::PI;
use std::io::Write;

use anyhow::{bail, Context, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spooflab_core::linalg::hermitian_eigen;
use spooflab_core::{
    angle_grid, build_quadratic_forms, enumerate_best, identity_waveform, make_theta,
    mean_power_clutter, mean_power_target, monte_carlo_power, scan_angle_pair, scan_pipeline,
    solve_mm, solve_sdp, solve_sdr, AdmmConfig, AnglePair, BaselineKind, CascadedCoefficients,
    MmConfig, Scenario,
};

/// Threshold grid of the trade-off sweep (mW).
pub const GAMMA_GRID_DEFAULT: [f64; 5] = [1e-8, 3e-8, 1e-7, 3e-7, 1e-6];

/// Angle-difference grid of the geometry sweep (degrees).
pub fn default_delta_grid() -> Vec<f64> {
    (1..=17).map(|i| 5.0 * i as f64).collect()
}

/// Scan grid of the angle-of-arrival experiment (signed degrees).
pub fn default_scan_grid() -> Vec<f64> {
    angle_grid(-90.0, 90.0, 0.25).expect("static grid bounds")
}

/// Parses a baseline kind name as used in CSV output and CLI flags.
pub fn parse_kind(name: &str) -> Result<BaselineKind> {
    BaselineKind::all()
        .into_iter()
        .find(|k| k.name() == name)
        .with_context(|| {
            let valid: Vec<&str> = BaselineKind::all().iter().map(|k| k.name()).collect();
            format!("unknown baseline kind {name:?}; valid kinds: {}", valid.join(", "))
        })
}

/// One point of the angle-of-arrival scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub kind: String,
    pub angle_deg: f64,
    pub power_mw: f64,
    pub status: String,
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub sweep_value: f64,
    pub sweep_unit: &'static str,
    pub p_target_mw: f64,
    pub p_clutter_mw: f64,
    pub solver: String,
    pub seed: u64,
    pub iterations: usize,
    pub status: String,
}

/// Planar positions (meters) realizing a scenario's angles and
/// distances: radar at the origin, x to the right, z upward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryLayout {
    pub radar_position: [f64; 2],
    pub target_position: [f64; 2],
    pub clutter_position: [f64; 2],
}

fn signed_degrees(pair: &AnglePair) -> f64 {
    let sign = if pair.azimuth.cos() < 0.0 { -1.0 } else { 1.0 };
    sign * pair.elevation.to_degrees()
}

/// Places the scenario in the plane.
///
/// The surface sits on the target; the radar-side angles and distances
/// fix both scatterer positions. (A scenario's quoted clutter–surface
/// distance may disagree with these positions — the reference
/// parameters themselves are not a consistent triangle — so sweeps that
/// need positions recompute link lengths from the layout.)
pub fn derive_layout(scenario: &Scenario) -> Result<GeometryLayout> {
    let s_ri = signed_degrees(&scenario.angle_ri).to_radians();
    let s_rc = signed_degrees(&scenario.angle_rc).to_radians();
    let target = [scenario.dist_ri * s_ri.sin(), scenario.dist_ri * s_ri.cos()];
    let clutter = [scenario.dist_rc * s_rc.sin(), scenario.dist_rc * s_rc.cos()];
    let layout = GeometryLayout {
        radar_position: [0.0, 0.0],
        target_position: target,
        clutter_position: clutter,
    };
    let dx = target[0] - clutter[0];
    let dz = target[1] - clutter[1];
    if (dx * dx + dz * dz).sqrt() <= f64::EPSILON {
        bail!("target and clutter coincide; no layout");
    }
    Ok(layout)
}

/// Angle difference between the radar and clutter directions seen from
/// the surface, per the two supported side arrangements.
pub fn compute_delta_diff(scenario: &Scenario) -> Result<f64> {
    let eta_ri = scenario.angle_ri.azimuth;
    let eta_ci = scenario.angle_ci.azimuth;
    let t_ri = scenario.angle_ri.elevation.to_degrees();
    let t_ci = scenario.angle_ci.elevation.to_degrees();
    let is = |eta: f64, v: f64| (eta - v).abs() <= 1e-12;
    if is(eta_ri, PI) && is(eta_ci, 0.0) {
        Ok(t_ri + t_ci)
    } else if is(eta_ri, PI) && is(eta_ci, PI) {
        Ok(t_ci - t_ri)
    } else {
        bail!(
            "unsupported side arrangement: radar azimuth {eta_ri}, clutter azimuth {eta_ci} \
             (supported: radar on the pi side with clutter on either side)"
        );
    }
}

/// Runs the angle-of-arrival scan for each baseline kind.
///
/// Emits one row per kind and grid angle, in that order. A kind whose
/// solver fails still emits its rows, zero-powered and flagged, so the
/// table shape is independent of solver outcomes.
pub fn run_aoa_scan(
    scenario: &Scenario,
    kinds: &[BaselineKind],
    seed: u64,
    epochs: usize,
    target_rcs: f64,
    grid_deg: &[f64],
) -> Vec<ScanRow> {
    let mut rows = Vec::with_capacity(kinds.len() * grid_deg.len());
    for &kind in kinds {
        match scan_pipeline(scenario, kind, epochs, seed, target_rcs, grid_deg) {
            Ok(scan) => {
                for (i, &deg) in grid_deg.iter().enumerate() {
                    rows.push(ScanRow {
                        kind: kind.name().to_string(),
                        angle_deg: deg,
                        power_mw: scan.power[i],
                        status: "ok".to_string(),
                    });
                }
            }
            Err(err) => {
                log::warn!("scan for {kind} failed: {err}");
                for &deg in grid_deg {
                    rows.push(ScanRow {
                        kind: kind.name().to_string(),
                        angle_deg: deg,
                        power_mw: 0.0,
                        status: format!("error: {err}"),
                    });
                }
            }
        }
    }
    rows
}

fn audit_cap(p_target: f64, gamma: f64, status: &mut String) {
    if p_target > gamma * (1.0 + 1e-9) && status == "ok" {
        *status = "cap-violated".to_string();
    }
}

fn gamma_row(
    scenario: &Scenario,
    coeffs: &CascadedCoefficients,
    kind: BaselineKind,
    gamma: f64,
    seed: u64,
) -> ExperimentRow {
    let solved: Result<(DVector<Complex64>, usize, bool)> = match kind {
        BaselineKind::OptimizedMm => solve_mm(coeffs, gamma, &MmConfig::default(), None)
            .map(|r| (r.theta.theta().clone_owned(), r.iterations, r.converged))
            .map_err(Into::into),
        BaselineKind::OptimizedSdr => solve_sdr(coeffs, gamma, &AdmmConfig::default(), seed)
            .map(|r| (r.theta.theta().clone_owned(), r.iterations, r.converged))
            .map_err(Into::into),
        // Kinds without a cap-dependent design still trace a (flat)
        // curve so baselines can sit on the same axes.
        other => make_theta(other, scenario, seed)
            .map(|rv| (rv.theta().clone_owned(), 0, true))
            .map_err(Into::into),
    };
    match solved {
        Ok((theta, iterations, converged)) => {
            let p_t = mean_power_target(coeffs, &theta);
            let mut status = if converged { "ok".to_string() } else { "max-iters".to_string() };
            audit_cap(p_t, gamma, &mut status);
            ExperimentRow {
                sweep_value: gamma,
                sweep_unit: "mW",
                p_target_mw: p_t,
                p_clutter_mw: mean_power_clutter(coeffs, &theta),
                solver: kind.name().to_string(),
                seed,
                iterations,
                status,
            }
        }
        Err(err) => ExperimentRow {
            sweep_value: gamma,
            sweep_unit: "mW",
            p_target_mw: 0.0,
            p_clutter_mw: 0.0,
            solver: kind.name().to_string(),
            seed,
            iterations: 0,
            status: format!("error: {err}"),
        },
    }
}

/// Runs the requested designers across a threshold grid, reporting the
/// expected echo powers of each design from the closed forms.
pub fn run_gamma_sweep(
    scenario: &Scenario,
    gammas: &[f64],
    kinds: &[BaselineKind],
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    if gammas.is_empty() {
        bail!("threshold grid is empty");
    }
    if kinds.is_empty() {
        bail!("no baseline kinds requested");
    }
    // `!is_finite` keeps NaN on the rejection branch.
    if let Some(&bad) = gammas.iter().find(|&&g| g <= 0.0 || !g.is_finite()) {
        bail!("thresholds must be positive and finite, got {bad}");
    }
    let coeffs = CascadedCoefficients::from_scenario(scenario);
    let mut rows = Vec::with_capacity(gammas.len() * kinds.len());
    for &gamma in gammas {
        for &kind in kinds {
            rows.push(gamma_row(scenario, &coeffs, kind, gamma, seed));
        }
    }
    Ok(rows)
}

/// Scenario for one requested angle difference, with the clutter slid
/// along its horizontal line. `None` when the angle is unreachable.
fn delta_scenario(scenario: &Scenario, layout: &GeometryLayout, delta_deg: f64) -> Result<Option<Scenario>> {
    if (scenario.angle_ri.azimuth - PI).abs() > 1e-12 {
        bail!("the angle-difference sweep supports the radar on the pi side of the surface boresight");
    }
    let theta_ri = scenario.angle_ri.elevation.to_degrees();
    let height = layout.target_position[1] - layout.clutter_position[1];
    if height <= 0.0 {
        bail!("clutter line must sit below the surface for this sweep");
    }
    if delta_deg < 0.0 {
        return Ok(None);
    }
    // Side of the surface boresight the clutter lands on: beyond the
    // radar direction for small differences, opposite side otherwise.
    let (theta_ci_deg, same_side) = if delta_deg >= theta_ri {
        (delta_deg - theta_ri, false)
    } else {
        (delta_deg + theta_ri, true)
    };
    if theta_ci_deg >= 89.0 {
        return Ok(None);
    }
    let theta_ci = theta_ci_deg.to_radians();
    let x = if same_side {
        layout.target_position[0] + height * theta_ci.tan()
    } else {
        layout.target_position[0] - height * theta_ci.tan()
    };
    let z = layout.clutter_position[1];
    let dist_ci = height / theta_ci.cos();
    let dist_rc = x.hypot(z);
    let angle_rc = scan_angle_pair(x.atan2(z).to_degrees())?;
    let angle_ci = AnglePair::new(theta_ci, if same_side { PI } else { 0.0 })?;
    let mut swept = scenario.clone();
    swept.angle_rc = angle_rc;
    swept.angle_ci = angle_ci;
    swept.dist_rc = dist_rc;
    swept.dist_ci = dist_ci;
    Ok(Some(swept))
}

/// Slides the clutter along its horizontal line to realize each angle
/// difference, re-solves the design, and reports the echo powers.
pub fn run_angle_diff_sweep(
    scenario: &Scenario,
    deltas_deg: &[f64],
    seed: u64,
) -> Result<(GeometryLayout, Vec<ExperimentRow>)> {
    if deltas_deg.is_empty() {
        bail!("angle grid is empty");
    }
    let layout = derive_layout(scenario)?;
    let mut rows = Vec::with_capacity(deltas_deg.len());
    for &delta in deltas_deg {
        let row = match delta_scenario(scenario, &layout, delta)? {
            None => ExperimentRow {
                sweep_value: delta,
                sweep_unit: "deg",
                p_target_mw: 0.0,
                p_clutter_mw: 0.0,
                solver: "optimized_mm".to_string(),
                seed,
                iterations: 0,
                status: "unreachable".to_string(),
            },
            Some(swept) => {
                let coeffs = CascadedCoefficients::from_scenario(&swept);
                match solve_mm(&coeffs, swept.threshold, &MmConfig::default(), None) {
                    Ok(report) => {
                        let theta = report.theta.theta();
                        let p_t = mean_power_target(&coeffs, theta);
                        let mut status = if report.converged {
                            "ok".to_string()
                        } else {
                            "max-iters".to_string()
                        };
                        audit_cap(p_t, swept.threshold, &mut status);
                        ExperimentRow {
                            sweep_value: delta,
                            sweep_unit: "deg",
                            p_target_mw: p_t,
                            p_clutter_mw: mean_power_clutter(&coeffs, theta),
                            solver: "optimized_mm".to_string(),
                            seed,
                            iterations: report.iterations,
                            status,
                        }
                    }
                    Err(err) => ExperimentRow {
                        sweep_value: delta,
                        sweep_unit: "deg",
                        p_target_mw: 0.0,
                        p_clutter_mw: 0.0,
                        solver: "optimized_mm".to_string(),
                        seed,
                        iterations: 0,
                        status: format!("error: {err}"),
                    },
                }
            }
        };
        rows.push(row);
    }
    Ok((layout, rows))
}

/// Result of a single-shot solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveSummary {
    pub solver: String,
    pub gamma: f64,
    pub p_target_mw: f64,
    pub p_clutter_mw: f64,
    pub iterations: usize,
    pub converged: bool,
    pub phases_rad: Vec<f64>,
}

/// Runs one solver once at one threshold.
pub fn run_single_solve(
    scenario: &Scenario,
    solver: &str,
    gamma: Option<f64>,
    seed: u64,
) -> Result<SolveSummary> {
    let gamma = gamma.unwrap_or(scenario.threshold);
    let coeffs = CascadedCoefficients::from_scenario(scenario);
    let report = match solver {
        "mm" | "optimized_mm" => solve_mm(&coeffs, gamma, &MmConfig::default(), None)?,
        "sdr" | "optimized_sdr" => solve_sdr(&coeffs, gamma, &AdmmConfig::default(), seed)?,
        other => bail!("unknown solver {other:?}; valid solvers: mm, sdr"),
    };
    let theta = report.theta.theta();
    Ok(SolveSummary {
        solver: solver.to_string(),
        gamma,
        p_target_mw: mean_power_target(&coeffs, theta),
        p_clutter_mw: mean_power_clutter(&coeffs, theta),
        iterations: report.iterations,
        converged: report.converged,
        phases_rad: theta.iter().map(|z| z.arg()).collect(),
    })
}

/// One self-check outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
}

/// Fast self-check of the numerical core on the given scenario:
/// closed forms against Monte Carlo, the spectral shortcut against a
/// dense eigensolve, both solvers' certificates, and the enumeration
/// sandwich on a desk-size instance.
pub fn run_validation(scenario: &Scenario, seed: u64) -> Vec<CheckRow> {
    let mut checks = Vec::new();
    let coeffs = CascadedCoefficients::from_scenario(scenario);
    let n = scenario.irs_len();

    // Closed-form echo powers match simulation.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let waveform = identity_waveform(scenario.radar_len());
        let mut noiseless = scenario.clone();
        noiseless.noise_power = 0.0;
        let mut worst: f64 = 0.0;
        let mut failure = None;
        for i in 0..3u64 {
            let theta = random_unit_vector(n, &mut rng);
            let expect_t = mean_power_target(&coeffs, &theta);
            let expect_c = mean_power_clutter(&coeffs, &theta);
            match monte_carlo_power(&noiseless, &theta, &waveform, 2000, seed + i) {
                Ok(mc) => {
                    let rel_t = (mc.mean_target - expect_t).abs() / expect_t.max(f64::MIN_POSITIVE);
                    let rel_c =
                        (mc.mean_clutter - expect_c).abs() / expect_c.max(f64::MIN_POSITIVE);
                    worst = worst.max(rel_t).max(rel_c);
                }
                Err(err) => failure = Some(err.to_string()),
            }
        }
        checks.push(CheckRow {
            check: "echo-power-closed-form".to_string(),
            passed: failure.is_none() && worst <= 0.02,
            detail: match failure {
                Some(err) => format!("simulation failed: {err}"),
                None => format!("worst relative deviation {worst:.3e} (limit 2.0e-2)"),
            },
        });
    }

    // Rank-two spectral shortcut matches a dense eigensolve.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let size = 6 + (rng.gen_range(0..6) as usize);
            let toy = CascadedCoefficients {
                g: random_unit_vector(size, &mut rng),
                v: random_unit_vector(size, &mut rng),
                r: random_unit_vector(size, &mut rng),
                q_r: rng.gen_range(1e-6..1e-2),
                q_c: rng.gen_range(1e-8..1e-3),
            };
            let forms = build_quadratic_forms(&toy);
            let fast = forms.lambda_max_a();
            let (vals, _) = hermitian_eigen(&forms.dense_a()).expect("dense eigensolve");
            let dense = vals[vals.len() - 1];
            worst = worst.max((fast - dense).abs() / dense.max(f64::MIN_POSITIVE));
        }
        checks.push(CheckRow {
            check: "spectral-bound-reduction".to_string(),
            passed: worst <= 1e-9,
            detail: format!("worst relative deviation {worst:.3e} (limit 1.0e-9)"),
        });
    }

    // Iterative solver: monotone ascent, feasible, converged.
    {
        match solve_mm(&coeffs, scenario.threshold, &MmConfig::default(), None) {
            Ok(report) => {
                let scale = report.obj_trace.last().copied().unwrap_or(1.0).abs();
                let monotone = report
                    .obj_trace
                    .windows(2)
                    .all(|w| w[1] >= w[0] - 1e-9 * scale.max(f64::MIN_POSITIVE));
                let feasible = report.power_target <= scenario.threshold * (1.0 + 1e-9);
                checks.push(CheckRow {
                    check: "iterative-solver-certificate".to_string(),
                    passed: monotone && feasible && report.converged,
                    detail: format!(
                        "monotone {monotone}, feasible {feasible}, converged {} in {} iterations",
                        report.converged, report.iterations
                    ),
                });
            }
            Err(err) => checks.push(CheckRow {
                check: "iterative-solver-certificate".to_string(),
                passed: false,
                detail: format!("solver failed: {err}"),
            }),
        }
    }

    // Relaxation solver certificate.
    {
        let forms = build_quadratic_forms(&coeffs);
        match solve_sdp(&forms, scenario.threshold, &AdmmConfig::default()) {
            Ok(sol) => {
                let diag_err = (0..forms.len())
                    .map(|i| (sol.theta_matrix[(i, i)] - Complex64::new(1.0, 0.0)).norm())
                    .fold(0.0f64, f64::max);
                let min_eig = hermitian_eigen(&sol.theta_matrix)
                    .map(|(vals, _)| vals[0])
                    .unwrap_or(f64::NEG_INFINITY);
                let passed = sol.converged
                    && sol.primal_residual <= 1e-6
                    && sol.dual_residual <= 1e-6
                    && diag_err <= 1e-6
                    && min_eig >= -1e-8;
                checks.push(CheckRow {
                    check: "relaxation-certificate".to_string(),
                    passed,
                    detail: format!(
                        "residuals {:.3e}/{:.3e}, diagonal error {:.3e}, min eigenvalue {:.3e}, {} iterations",
                        sol.primal_residual, sol.dual_residual, diag_err, min_eig, sol.iterations
                    ),
                });
            }
            Err(err) => checks.push(CheckRow {
                check: "relaxation-certificate".to_string(),
                passed: false,
                detail: format!("solver failed: {err}"),
            }),
        }
    }

    // Enumeration sandwich on a desk-size instance.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbf);
        let toy = CascadedCoefficients {
            g: random_unit_vector(4, &mut rng),
            v: random_unit_vector(4, &mut rng),
            r: random_unit_vector(4, &mut rng),
            q_r: 5e-2,
            q_c: 2e-2,
        };
        let forms = build_quadratic_forms(&toy);
        let gamma = forms.lambda_max_b() * 4.0 * 0.5;
        let outcome = (|| -> Result<(f64, f64, f64)> {
            let bf = enumerate_best(&forms, gamma, 16, false)?;
            let sdp = solve_sdp(&forms, gamma, &AdmmConfig::default())?;
            let mm = solve_mm(&toy, gamma, &MmConfig::default(), None)?;
            Ok((bf.objective, sdp.objective, mm.obj_clutter))
        })();
        match outcome {
            Ok((bf, sdp, mm)) => {
                let passed = bf <= sdp * (1.0 + 1e-6) && mm >= 0.98 * bf;
                checks.push(CheckRow {
                    check: "enumeration-sandwich".to_string(),
                    passed,
                    detail: format!(
                        "enumerated {bf:.6e} <= relaxed {sdp:.6e}, iterative {mm:.6e} >= 0.98x enumerated"
                    ),
                });
            }
            Err(err) => checks.push(CheckRow {
                check: "enumeration-sandwich".to_string(),
                passed: false,
                detail: format!("failed: {err}"),
            }),
        }
    }

    // Geometry round trip: slide the clutter to a few angle
    // differences and confirm the rebuilt scenario reproduces the
    // requested difference and the distances of its own placement.
    {
        let outcome = (|| -> Result<f64> {
            let layout = derive_layout(scenario)?;
            let mut worst: f64 = 0.0;
            for delta in [5.0, 22.0, 30.0, 61.0, 85.0] {
                let Some(swept) = delta_scenario(scenario, &layout, delta)? else {
                    bail!("difference {delta} deg unexpectedly unreachable");
                };
                let again = derive_layout(&swept)?;
                let dx = again.target_position[0] - again.clutter_position[0];
                let dz = again.target_position[1] - again.clutter_position[1];
                let range_rc = again.clutter_position[0].hypot(again.clutter_position[1]);
                worst = worst
                    .max((compute_delta_diff(&swept)? - delta).abs())
                    .max((dx.hypot(dz) - swept.dist_ci).abs())
                    .max((range_rc - swept.dist_rc).abs());
            }
            Ok(worst)
        })();
        match outcome {
            Ok(worst) => checks.push(CheckRow {
                check: "geometry-round-trip".to_string(),
                passed: worst <= 1e-9,
                detail: format!(
                    "worst angle/distance mismatch {worst:.3e} across 5 placements (limit 1.0e-9)"
                ),
            }),
            Err(err) => checks.push(CheckRow {
                check: "geometry-round-trip".to_string(),
                passed: false,
                detail: format!("failed: {err}"),
            }),
        }
    }

    checks
}

fn write_metadata<W: Write>(out: &mut W, meta: &[(&str, String)]) -> Result<()> {
    for (key, value) in meta {
        writeln!(out, "# {key}: {value}")?;
    }
    Ok(())
}

/// Writes the scan table with `# key: value` metadata above the header.
pub fn write_scan_csv<W: Write>(out: &mut W, rows: &[ScanRow], meta: &[(&str, String)]) -> Result<()> {
    write_metadata(out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "angle_deg", "power_mw", "status"])?;
    for row in rows {
        w.write_record([
            row.kind.as_str(),
            &format!("{:.2}", row.angle_deg),
            &format!("{:.12e}", row.power_mw),
            row.status.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a sweep table with `# key: value` metadata above the header.
pub fn write_sweep_csv<W: Write>(
    out: &mut W,
    rows: &[ExperimentRow],
    meta: &[(&str, String)],
) -> Result<()> {
    write_metadata(out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "sweep_value",
        "sweep_unit",
        "p_target_mw",
        "p_clutter_mw",
        "solver",
        "seed",
        "iterations",
        "status",
    ])?;
    for row in rows {
        let value = match row.sweep_unit {
            "deg" => format!("{:.3}", row.sweep_value),
            _ => format!("{:.6e}", row.sweep_value),
        };
        w.write_record([
            value.as_str(),
            row.sweep_unit,
            &format!("{:.12e}", row.p_target_mw),
            &format!("{:.12e}", row.p_clutter_mw),
            row.solver.as_str(),
            &row.seed.to_string(),
            &row.iterations.to_string(),
            row.status.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a single-shot solve: summary metadata, then per-element phases.
pub fn write_solve_csv<W: Write>(
    out: &mut W,
    summary: &SolveSummary,
    meta: &[(&str, String)],
) -> Result<()> {
    write_metadata(out, meta)?;
    writeln!(out, "# solver: {}", summary.solver)?;
    writeln!(out, "# gamma_mw: {:.6e}", summary.gamma)?;
    writeln!(out, "# p_target_mw: {:.12e}", summary.p_target_mw)?;
    writeln!(out, "# p_clutter_mw: {:.12e}", summary.p_clutter_mw)?;
    writeln!(out, "# iterations: {}", summary.iterations)?;
    writeln!(out, "# converged: {}", summary.converged)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["element", "phase_rad"])?;
    for (i, phase) in summary.phases_rad.iter().enumerate() {
        w.write_record([i.to_string().as_str(), &format!("{phase:.12}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes self-check outcomes.
pub fn write_checks_csv<W: Write>(
    out: &mut W,
    rows: &[CheckRow],
    meta: &[(&str, String)],
) -> Result<()> {
    write_metadata(out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "status", "detail"])?;
    for row in rows {
        w.write_record([
            row.check.as_str(),
            if row.passed { "PASS" } else { "FAIL" },
            row.detail.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
