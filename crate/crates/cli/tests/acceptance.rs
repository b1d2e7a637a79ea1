//! Acceptance gate: one test per release criterion, each printing a
//! single `[acceptance] <name>: PASS|FAIL — detail` line (run with
//! `--nocapture` to see the lines for passing tests too).
//!
//! The scan criterion encodes the full published claim about the
//! receive spectrum. The reference parameters put roughly 21 dB more
//! power on the direct return than on the decoy return, so parts of
//! that claim fail on a faithful simulation; the test states the claim
//! as written and reports the measured numbers rather than weakening
//! the check.

use std::path::Path;
use std::process::Command;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spooflab_cli::experiments::default_scan_grid;
use spooflab_core::linalg::hermitian_eigen;
use spooflab_core::{
    build_quadratic_forms, enumerate_best, feasibility_restore, identity_waveform,
    mean_power_clutter, mean_power_target, mm_step, monte_carlo_power, scan_angle_pair,
    scan_pipeline, solve_mm, solve_sdp, solve_sdr, AdmmConfig, BaselineKind, CascadedCoefficients,
    MmConfig, Scenario, UpaGeometry,
};

fn verdict(name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] {name}: {status} — {detail}");
}

fn random_unit_theta(n: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| {
        Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
    })
}

fn random_coeffs(n: usize, rng: &mut ChaCha8Rng) -> CascadedCoefficients {
    CascadedCoefficients {
        g: random_unit_theta(n, rng),
        v: random_unit_theta(n, rng),
        r: random_unit_theta(n, rng),
        q_r: 10f64.powf(rng.gen_range(-6.0..-1.0)),
        q_c: 10f64.powf(rng.gen_range(-8.0..-2.0)),
    }
}

fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let wavelength = 0.05;
    let radar = UpaGeometry::half_wavelength(
        rng.gen_range(1..=3),
        rng.gen_range(1..=3),
        wavelength,
    )
    .unwrap();
    let irs = UpaGeometry::half_wavelength(
        rng.gen_range(2..=4),
        rng.gen_range(3..=5),
        wavelength,
    )
    .unwrap();
    Scenario::new(
        radar,
        irs,
        scan_angle_pair(rng.gen_range(-75.0..75.0)).unwrap(),
        scan_angle_pair(rng.gen_range(-75.0..75.0)).unwrap(),
        scan_angle_pair(rng.gen_range(-75.0..75.0)).unwrap(),
        rng.gen_range(20.0..300.0),
        rng.gen_range(20.0..300.0),
        rng.gen_range(10.0..100.0),
        10f64.powf(rng.gen_range(-4.0..-2.0)),
        10f64.powf(rng.gen_range(-1.0..1.5)),
        0.0,
        1e-7,
    )
    .unwrap()
}

/// Closed-form echo powers match a 20 000-trial Monte-Carlo average
/// within 2% relative, for 10 random unit-modulus designs on the
/// reference scenario with the flat orthogonal waveform and no noise.
#[test]
fn closed_form_powers_match_monte_carlo() {
    let scenario = Scenario::default();
    let coeffs = CascadedCoefficients::from_scenario(&scenario);
    let waveform = identity_waveform(scenario.radar_len());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for i in 0..10u64 {
        let theta = random_unit_theta(scenario.irs_len(), &mut rng);
        let expect_t = mean_power_target(&coeffs, &theta);
        let expect_c = mean_power_clutter(&coeffs, &theta);
        let mc = monte_carlo_power(&scenario, &theta, &waveform, 20_000, 1000 + i)
            .expect("simulation runs");
        worst = worst
            .max((mc.mean_target - expect_t).abs() / expect_t)
            .max((mc.mean_clutter - expect_c).abs() / expect_c);
    }
    let pass = worst <= 0.02;
    verdict(
        "closed_form_powers_match_monte_carlo",
        pass,
        &format!("worst relative error {worst:.3e} over 10 designs (limit 2.0e-2)"),
    );
    assert!(pass, "worst relative error {worst:.3e} exceeds 2%");
}

/// Every iterate of the ascent solver stays inside the spoof-power cap
/// (within 1e-9 relative) and never decreases the objective (within
/// 1e-9 of the final scale), across 50 random scenarios.
#[test]
fn ascent_solver_iterates_stay_feasible_and_monotone() {
    let config = MmConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_cap_excess: f64 = f64::NEG_INFINITY;
    let mut worst_drop: f64 = f64::NEG_INFINITY;
    for case in 0..50 {
        let scenario = random_scenario(&mut rng);
        let coeffs = CascadedCoefficients::from_scenario(&scenario);
        let forms = build_quadratic_forms(&coeffs);
        let n = scenario.irs_len();
        let gamma = forms.lambda_max_b() * n as f64 * 10f64.powf(rng.gen_range(-1.5..0.0));
        let ones = DVector::from_element(n, Complex64::new(1.0, 0.0));
        let start = feasibility_restore(&ones, &forms, gamma, &config)
            .unwrap_or_else(|e| panic!("case {case}: no feasible start: {e}"));
        let mut theta = start;
        let mut trace = vec![forms.a_quad(&theta)];
        worst_cap_excess = worst_cap_excess.max(forms.b_quad(&theta) / gamma - 1.0);
        for _ in 0..120 {
            let (next, _mu, _degenerate) = mm_step(&theta, &forms, gamma, &config)
                .unwrap_or_else(|e| panic!("case {case}: step failed: {e}"));
            worst_cap_excess = worst_cap_excess.max(forms.b_quad(&next) / gamma - 1.0);
            let obj = forms.a_quad(&next);
            trace.push(obj);
            let prev = trace[trace.len() - 2];
            theta = next;
            if (obj - prev).abs() <= 1e-12 * obj.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        let scale = trace.last().copied().unwrap().abs().max(f64::MIN_POSITIVE);
        for pair in trace.windows(2) {
            worst_drop = worst_drop.max((pair[0] - pair[1]) / scale);
        }
    }
    let pass = worst_cap_excess <= 1e-9 && worst_drop <= 1e-9;
    verdict(
        "ascent_solver_iterates_stay_feasible_and_monotone",
        pass,
        &format!(
            "worst cap excess {worst_cap_excess:.3e} (limit 1e-9), worst objective drop \
             {worst_drop:.3e} of final scale (limit 1e-9), 50 scenarios"
        ),
    );
    assert!(pass);
}

/// On 20 random four-element instances with 16 phase levels, exhaustive
/// enumeration never beats the convex relaxation, the ascent solver
/// never beats the relaxation, and the ascent solver reaches at least
/// 98% of the enumerated optimum.
#[test]
fn relaxation_enumeration_and_ascent_agree_at_desk_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_bf_over_sdp: f64 = f64::NEG_INFINITY;
    let mut worst_mm_over_sdp: f64 = f64::NEG_INFINITY;
    let mut worst_mm_vs_bf: f64 = f64::INFINITY;
    for case in 0..20 {
        let coeffs = random_coeffs(4, &mut rng);
        let forms = build_quadratic_forms(&coeffs);
        // Anchor the cap on an enumerable design so a feasible grid
        // point is guaranteed to exist.
        let levels = 16u32;
        let anchor = DVector::from_fn(4, |_, _| {
            let k = rng.gen_range(0..levels);
            Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / levels as f64)
        });
        let gamma = forms.b_quad(&anchor) * rng.gen_range(1.05..1.5);
        let bf = enumerate_best(&forms, gamma, levels, false)
            .unwrap_or_else(|e| panic!("case {case}: enumeration failed: {e}"));
        let sdp = solve_sdp(&forms, gamma, &AdmmConfig::default())
            .unwrap_or_else(|e| panic!("case {case}: relaxation failed: {e}"));
        let mm = solve_mm(&coeffs, gamma, &MmConfig::default(), None)
            .unwrap_or_else(|e| panic!("case {case}: ascent failed: {e}"));
        worst_bf_over_sdp = worst_bf_over_sdp.max(bf.objective / sdp.objective - 1.0);
        worst_mm_over_sdp = worst_mm_over_sdp.max(mm.obj_clutter / sdp.objective - 1.0);
        worst_mm_vs_bf = worst_mm_vs_bf.min(mm.obj_clutter / bf.objective);
    }
    let pass =
        worst_bf_over_sdp <= 1e-6 && worst_mm_over_sdp <= 1e-6 && worst_mm_vs_bf >= 0.98;
    verdict(
        "relaxation_enumeration_and_ascent_agree_at_desk_scale",
        pass,
        &format!(
            "enumerated/relaxed excess {worst_bf_over_sdp:.3e}, ascent/relaxed excess \
             {worst_mm_over_sdp:.3e} (limits 1e-6), ascent at worst {worst_mm_vs_bf:.4} of \
             enumerated (limit 0.98), 20 instances"
        ),
    );
    assert!(pass);
}

const GAMMA_GRID: [f64; 5] = [1e-8, 3e-8, 1e-7, 3e-7, 1e-6];

/// Both designers deliver nearly the same decoy power at every cap in
/// the reference grid, and neither exceeds its spoof-power cap.
#[test]
fn both_designers_agree_across_the_cap_grid() {
    let scenario = Scenario::default();
    let coeffs = CascadedCoefficients::from_scenario(&scenario);
    let mut worst_parity: f64 = f64::INFINITY;
    let mut worst_cap: f64 = f64::NEG_INFINITY;
    for &gamma in &GAMMA_GRID {
        let mm = solve_mm(&coeffs, gamma, &MmConfig::default(), None).expect("ascent solves");
        let sdr = solve_sdr(&coeffs, gamma, &AdmmConfig::default(), 3).expect("relaxation solves");
        let mm_pc = mean_power_clutter(&coeffs, mm.theta.theta());
        let sdr_pc = mean_power_clutter(&coeffs, sdr.theta.theta());
        worst_parity = worst_parity.min(mm_pc / sdr_pc);
        worst_cap = worst_cap
            .max(mean_power_target(&coeffs, mm.theta.theta()) - gamma)
            .max(mean_power_target(&coeffs, sdr.theta.theta()) - gamma);
    }
    let pass = worst_parity >= 0.9 && worst_cap <= 0.0;
    verdict(
        "both_designers_agree_across_the_cap_grid",
        pass,
        &format!(
            "ascent/relaxed decoy-power ratio at worst {worst_parity:.4} (limit 0.90), worst \
             spoof-power margin {worst_cap:.3e} mW (limit 0), caps 1e-8..1e-6 mW"
        ),
    );
    assert!(pass);
}

/// Decoy power from the ascent designer does not decrease as the
/// spoof-power cap loosens across the reference grid. Values produced
/// by independent solver runs are compared with a 1e-9 relative tie
/// tolerance: on this grid the cap never binds, so the five optima are
/// the same point and differ only in solver noise far below that.
#[test]
fn clutter_power_trades_off_monotonically_with_the_cap() {
    let scenario = Scenario::default();
    let coeffs = CascadedCoefficients::from_scenario(&scenario);
    let powers: Vec<f64> = GAMMA_GRID
        .iter()
        .map(|&gamma| {
            let mm = solve_mm(&coeffs, gamma, &MmConfig::default(), None).expect("ascent solves");
            mean_power_clutter(&coeffs, mm.theta.theta())
        })
        .collect();
    let pass = powers.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
    let listing = powers
        .iter()
        .map(|p| format!("{p:.6e}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(
        "clutter_power_trades_off_monotonically_with_the_cap",
        pass,
        &format!("decoy powers across the cap grid: {listing}"),
    );
    assert!(pass, "powers not non-decreasing: {listing}");
}

fn grid_index_of(grid: &[f64], angle: f64) -> usize {
    grid.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - angle).abs().total_cmp(&(b.1 - angle).abs()))
        .map(|(i, _)| i)
        .unwrap()
}

fn window_max(grid: &[f64], power: &[f64], center: f64, half_width: f64) -> f64 {
    grid.iter()
        .zip(power)
        .filter(|(a, _)| (*a - center).abs() <= half_width)
        .map(|(_, p)| *p)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[sorted.len() / 2]
}

/// The published receive-spectrum claim, stated in full: with the
/// optimized surface the dominant peak sits on the decoy within 1
/// degree, the true direction reads at least 20 dB below the decoy peak
/// and below the detection threshold, the bare-target baseline peaks on
/// the true direction, and the random-phase baseline shows both returns
/// at least 10 dB above the scan median.
#[test]
fn scan_shows_the_decoy_not_the_target() {
    let scenario = Scenario::default();
    let grid = default_scan_grid();
    let epochs = 200;
    let target_rcs = 10.0;
    let optimized =
        scan_pipeline(&scenario, BaselineKind::OptimizedMm, epochs, 5, target_rcs, &grid)
            .expect("optimized scan runs");
    let bare = scan_pipeline(&scenario, BaselineKind::NoIrs, epochs, 5, target_rcs, &grid)
        .expect("bare scan runs");
    let random =
        scan_pipeline(&scenario, BaselineKind::RandomPhase, epochs, 5, target_rcs, &grid)
            .expect("random scan runs");

    let mut subs: Vec<(bool, String)> = Vec::new();

    let argmax_angle = |scan: &spooflab_core::SpectrumScan| -> f64 {
        grid.iter()
            .zip(&scan.power)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(a, _)| *a)
            .unwrap()
    };

    let opt_argmax = argmax_angle(&optimized);
    subs.push((
        (opt_argmax - -52.0).abs() <= 1.0,
        format!("optimized dominant peak at {opt_argmax:.2} deg (required within 1 deg of -52)"),
    ));

    let decoy_peak = window_max(&grid, &optimized.power, -52.0, 1.0);
    let at_true = optimized.power[grid_index_of(&grid, -30.0)];
    let rejection_db = 10.0 * (decoy_peak / at_true).log10();
    subs.push((
        rejection_db >= 20.0,
        format!(
            "optimized spectrum at -30 deg is {rejection_db:.1} dB below the decoy peak \
             (required >= 20 dB)"
        ),
    ));
    subs.push((
        at_true < scenario.threshold,
        format!(
            "optimized spectrum at -30 deg is {at_true:.3e} mW vs threshold {:.3e} mW \
             (required below)",
            scenario.threshold
        ),
    ));

    let bare_argmax = argmax_angle(&bare);
    subs.push((
        (bare_argmax - -30.0).abs() <= 1.0,
        format!("bare-target peak at {bare_argmax:.2} deg (required within 1 deg of -30)"),
    ));

    let rnd_median = median(&random.power);
    let rnd_true_db = 10.0 * (window_max(&grid, &random.power, -30.0, 1.0) / rnd_median).log10();
    let rnd_decoy_db = 10.0 * (window_max(&grid, &random.power, -52.0, 1.0) / rnd_median).log10();
    subs.push((
        rnd_true_db >= 10.0 && rnd_decoy_db >= 10.0,
        format!(
            "random-phase returns over median: {rnd_true_db:.1} dB at -30, {rnd_decoy_db:.1} dB \
             at -52 (required >= 10 dB each)"
        ),
    ));

    let failed: Vec<&String> = subs.iter().filter(|(ok, _)| !ok).map(|(_, d)| d).collect();
    let pass = failed.is_empty();
    verdict(
        "scan_shows_the_decoy_not_the_target",
        pass,
        &format!("{} of {} sub-checks passed", subs.len() - failed.len(), subs.len()),
    );
    for (ok, detail) in &subs {
        println!("    [sub] {}: {detail}", if *ok { "PASS" } else { "FAIL" });
    }
    assert!(
        pass,
        "spectrum claim does not hold as stated; failing sub-checks: {failed:#?}"
    );
}

/// Decoy power peaks at moderate angular separation between the true
/// and decoy directions, and falls off on both sides.
#[test]
fn clutter_power_peaks_at_moderate_angle_separation() {
    let scenario = Scenario::default();
    let (_, rows) =
        spooflab_cli::experiments::run_angle_diff_sweep(&scenario, &[5.0, 30.0, 80.0], 9)
            .expect("sweep runs");
    assert!(rows.iter().all(|r| r.status == "ok"), "rows: {rows:#?}");
    let p5 = rows[0].p_clutter_mw;
    let p30 = rows[1].p_clutter_mw;
    let p80 = rows[2].p_clutter_mw;
    let pass = p5 < p30 && p80 < p30;
    verdict(
        "clutter_power_peaks_at_moderate_angle_separation",
        pass,
        &format!("decoy power {p5:.3e} mW at 5 deg, {p30:.3e} at 30 deg, {p80:.3e} at 80 deg"),
    );
    assert!(pass);
}

/// The closed-form largest eigenvalue of the two low-rank forms matches
/// a dense Hermitian eigensolve within 1e-9 relative on 100 random
/// coefficient sets.
#[test]
fn spectral_shortcut_matches_dense_eigensolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(3..40);
        let coeffs = random_coeffs(n, &mut rng);
        let forms = build_quadratic_forms(&coeffs);
        for (fast, dense) in [
            (forms.lambda_max_a(), forms.dense_a()),
            (forms.lambda_max_b(), forms.dense_b()),
        ] {
            let (vals, _) = hermitian_eigen(&dense).expect("dense eigensolve");
            let reference = vals[vals.len() - 1];
            worst = worst.max((fast - reference).abs() / reference.abs().max(f64::MIN_POSITIVE));
        }
    }
    let pass = worst <= 1e-9;
    verdict(
        "spectral_shortcut_matches_dense_eigensolve",
        pass,
        &format!("worst relative deviation {worst:.3e} over 100 sets (limit 1e-9)"),
    );
    assert!(pass);
}

/// The splitting solver certifies its own solution on the reference
/// scenario: scaled residuals at most 1e-6, unit diagonal within 1e-6,
/// and no eigenvalue below -1e-8.
#[test]
fn relaxation_solver_certifies_its_solution() {
    let scenario = Scenario::default();
    let coeffs = CascadedCoefficients::from_scenario(&scenario);
    let forms = build_quadratic_forms(&coeffs);
    let sol = solve_sdp(&forms, scenario.threshold, &AdmmConfig::default())
        .expect("relaxation solves");
    let diag_err = (0..forms.len())
        .map(|i| (sol.theta_matrix[(i, i)] - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0f64, f64::max);
    let (vals, _) = hermitian_eigen(&sol.theta_matrix).expect("eigensolve");
    let min_eig = vals[0];
    let pass = sol.primal_residual <= 1e-6
        && sol.dual_residual <= 1e-6
        && diag_err <= 1e-6
        && min_eig >= -1e-8;
    verdict(
        "relaxation_solver_certifies_its_solution",
        pass,
        &format!(
            "residuals {:.3e}/{:.3e} (limits 1e-6), diagonal error {diag_err:.3e} (limit 1e-6), \
             min eigenvalue {min_eig:.3e} (limit -1e-8), {} iterations",
            sol.primal_residual, sol.dual_residual, sol.iterations
        ),
    );
    assert!(pass);
}

/// Every CLI verb produces byte-identical CSV when run twice with the
/// same seed.
#[test]
fn cli_output_is_byte_deterministic() {
    let bin = env!("CARGO_BIN_EXE_spooflab");
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |verb_args: &[&str], out: &Path| {
        let status = Command::new(bin)
            .args(verb_args)
            .arg("--seed")
            .arg("3")
            .arg("--out")
            .arg(out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "{verb_args:?} exited with {status}");
    };
    let verbs: [&[&str]; 5] = [
        &["scan-aoa", "--epochs", "5"],
        &["sweep-gamma"],
        &["sweep-delta"],
        &["solve", "--solver", "sdr"],
        &["validate"],
    ];
    let mut all_same = true;
    let mut detail = Vec::new();
    for (i, verb) in verbs.iter().enumerate() {
        let out1 = dir.path().join(format!("{i}_1.csv"));
        let out2 = dir.path().join(format!("{i}_2.csv"));
        run(verb, &out1);
        run(verb, &out2);
        let bytes1 = std::fs::read(&out1).expect("first output");
        let bytes2 = std::fs::read(&out2).expect("second output");
        let same = bytes1 == bytes2;
        all_same &= same;
        detail.push(format!(
            "{} {} ({} bytes)",
            verb[0],
            if same { "identical" } else { "DIFFERS" },
            bytes1.len()
        ));
    }
    verdict(
        "cli_output_is_byte_deterministic",
        all_same,
        &detail.join(", "),
    );
    assert!(all_same);
}
