//! Echo simulation and mean received power of the two spoofed returns.
//!
//! After the static direct return is removed, the radar sees two rank-1
//! echo components: one arriving from the surface direction (the fake
//! target) and one from the clutter direction. Averaged over the epoch
//! phases and a unit-power waveform, their powers reduce to quadratic
//! forms in the reflection vector `theta`:
//!
//! ```text
//! target power  = q_r * q_c * |g^H theta|^2 + q_r^2 * |v^H theta|^2
//! clutter power = q_c^2 * |r^H theta|^2 + q_c * q_r * |g^H theta|^2
//! ```
//!
//! with the cascaded steering products `g`, `v`, `r` and the path power
//! budgets `q_r` (radar <-> surface round trip) and `q_c` (the two
//! clutter hops). All powers are in mW under a 1 mW per-antenna
//! transmit convention.
//!
//! [`simulate_echo`] materializes the full per-epoch block signal model;
//! [`echo_term_powers`] computes the same two component powers for one
//! epoch in `O(N M)` without forming any `M x K` matrices, which is what
//! makes large Monte-Carlo sweeps cheap.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::{
    build_channels, draw_phases, path_gain_clutter, path_gain_direct, ClutterLink, PhaseDraw,
    Scenario,
};
use crate::error::{Error, Result};
use crate::geometry::steering_2d;

/// Whether the surface re-radiates or just absorbs the incident field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionMode {
    /// Passive unit-modulus reflection with programmable phases.
    Reflect,
    /// Perfect absorption: the surface contributes no echo at all.
    Absorb,
}

/// A validated surface configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionVector {
    theta: DVector<Complex64>,
    mode: ReflectionMode,
}

impl ReflectionVector {
    /// Wraps a reflection vector, checking every entry for unit modulus.
    pub fn reflect(theta: DVector<Complex64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("reflection vector must not be empty"));
        }
        for (n, t) in theta.iter().enumerate() {
            if (t.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::invalid(format!(
                    "reflection entry {n} has modulus {}, expected 1",
                    t.norm()
                )));
            }
        }
        Ok(ReflectionVector { theta, mode: ReflectionMode::Reflect })
    }

    /// Fully absorbing surface of `n` elements (all coefficients zero).
    pub fn absorb(n: usize) -> Self {
        ReflectionVector {
            theta: DVector::from_element(n, Complex64::new(0.0, 0.0)),
            mode: ReflectionMode::Absorb,
        }
    }

    /// The per-element reflection coefficients.
    pub fn theta(&self) -> &DVector<Complex64> {
        &self.theta
    }

    pub fn mode(&self) -> ReflectionMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Cascaded steering products and path power budgets of a scenario.
///
/// `g`, `v`, `r` are length-`N` vectors such that for a diagonal surface
/// response `diag(theta)`:
///
/// * `g^H theta` is the cascade entering along one hop direction and
///   leaving along the other (surface <-> clutter cross path),
/// * `v^H theta` is the double pass along the radar-facing direction,
/// * `r^H theta` is the double pass along the clutter-facing direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedCoefficients {
    pub g: DVector<Complex64>,
    pub v: DVector<Complex64>,
    pub r: DVector<Complex64>,
    /// Round-trip power budget of the radar <-> surface path (mW).
    pub q_r: f64,
    /// Combined power budget of the two clutter hops (mW).
    pub q_c: f64,
}

impl CascadedCoefficients {
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let a_i_ri = steering_2d(&scenario.angle_ri, &scenario.irs_geom);
        let a_i_ci = steering_2d(&scenario.angle_ci, &scenario.irs_geom);
        let g = a_i_ri.component_mul(&a_i_ci).map(|z| z.conj());
        let v = a_i_ri.component_mul(&a_i_ri).map(|z| z.conj());
        let r = a_i_ci.component_mul(&a_i_ci).map(|z| z.conj());
        let (q_r, q_c) = q_factors(scenario);
        CascadedCoefficients { g, v, r, q_r, q_c }
    }

    /// Surface element count `N`.
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

/// Cascaded steering products for `scenario`; see [`CascadedCoefficients`].
pub fn cascaded_vectors(scenario: &Scenario) -> CascadedCoefficients {
    CascadedCoefficients::from_scenario(scenario)
}

/// Path power budgets `(q_r, q_c)` in mW.
///
/// `q_r = alpha / d_ri^2 * M` collects the radar <-> surface round trip,
/// `q_c = (kappa alpha / d_rc^2)(kappa alpha / d_ci^2) * M` the two
/// clutter hops; both absorb the radar aperture gain `M`.
pub fn q_factors(scenario: &Scenario) -> (f64, f64) {
    let m = scenario.radar_len() as f64;
    let q_r = scenario.ref_gain / (scenario.dist_ri * scenario.dist_ri) * m;
    let ka = scenario.clutter_rcs * scenario.ref_gain;
    let q_c = ka / (scenario.dist_rc * scenario.dist_rc) * (ka
        / (scenario.dist_ci * scenario.dist_ci))
        * m;
    (q_r, q_c)
}

/// Mean received power of the fake-target return (mW).
pub fn mean_power_target(coeffs: &CascadedCoefficients, theta: &DVector<Complex64>) -> f64 {
    let gh = coeffs.g.dotc(theta).norm_sqr();
    let vh = coeffs.v.dotc(theta).norm_sqr();
    coeffs.q_r * coeffs.q_c * gh + coeffs.q_r * coeffs.q_r * vh
}

/// Mean received power of the surface-induced clutter return (mW).
pub fn mean_power_clutter(coeffs: &CascadedCoefficients, theta: &DVector<Complex64>) -> f64 {
    let rh = coeffs.r.dotc(theta).norm_sqr();
    let gh = coeffs.g.dotc(theta).norm_sqr();
    coeffs.q_c * coeffs.q_c * rh + coeffs.q_c * coeffs.q_r * gh
}

/// Orthogonal full-power sounding waveform: `sqrt(m) * I_m`.
///
/// Satisfies `S S^H = K I` exactly with `K = m` snapshots, so per-epoch
/// component powers match their waveform expectation with zero variance.
pub fn identity_waveform(m: usize) -> DMatrix<Complex64> {
    DMatrix::from_diagonal_element(m, m, Complex64::new((m as f64).sqrt(), 0.0))
}

/// Random QPSK waveform, `m x k`, entries drawn from `{+-1 +- i}/sqrt(2)`.
pub fn qpsk_waveform<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(m, k, |_, _| {
        let re = if rng.gen::<bool>() { s } else { -s };
        let im = if rng.gen::<bool>() { s } else { -s };
        Complex64::new(re, im)
    })
}

/// One simulated sounding interval, split into its physical components.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoBatch {
    /// Everything the radar records, `M x K`.
    pub received: DMatrix<Complex64>,
    /// Component arriving with the surface-direction signature.
    pub target_component: DMatrix<Complex64>,
    /// Component arriving with the clutter-direction signature.
    pub clutter_component: DMatrix<Complex64>,
    /// Static direct return from the clutter patch (surface not involved).
    pub background: DMatrix<Complex64>,
}

/// Materializes the full received block for one epoch.
///
/// `received = target + clutter + background + noise` where the first two
/// components pass through the surface once and twice respectively, the
/// background is the bare radar <-> clutter bounce, and the noise is
/// i.i.d. circular Gaussian with per-sample power `noise_power`.
pub fn simulate_echo<R: Rng + ?Sized>(
    scenario: &Scenario,
    theta: &DVector<Complex64>,
    waveform: &DMatrix<Complex64>,
    draw: &PhaseDraw,
    rng: &mut R,
) -> Result<EchoBatch> {
    let m = scenario.radar_len();
    let n = scenario.irs_len();
    if theta.len() != n {
        return Err(Error::invalid(format!(
            "reflection vector has {} entries, surface has {n}",
            theta.len()
        )));
    }
    if waveform.nrows() != m {
        return Err(Error::invalid(format!(
            "waveform has {} rows, radar has {m} antennas",
            waveform.nrows()
        )));
    }

    let ch = build_channels(scenario, draw);
    // Combined inbound channel radar -> surface, direct plus via clutter.
    let combined = &ch.g_ri + &ch.h_ci * ch.h_rc.transpose();
    let reflected = DMatrix::from_fn(n, waveform.ncols(), |i, j| {
        theta[i] * (combined.row(i) * waveform.column(j))[(0, 0)]
    });
    let target_component = ch.g_ri.transpose() * &reflected;
    let clutter_component = {
        let row = ch.h_ci.transpose() * &reflected;
        &ch.h_rc * row
    };
    let background = &ch.h_rc * (ch.h_rc.transpose() * waveform);

    let mut received = &target_component + &clutter_component + &background;
    if scenario.noise_power > 0.0 {
        let normal = Normal::new(0.0, (scenario.noise_power / 2.0).sqrt())
            .expect("valid standard deviation");
        for z in received.iter_mut() {
            *z += Complex64::new(normal.sample(rng), normal.sample(rng));
        }
    }

    Ok(EchoBatch { received, target_component, clutter_component, background })
}

/// Subtracts the static clutter bounce from a received block.
///
/// The direct return depends only on the known clutter direction,
/// distance and RCS (its phase is deterministic), so the radar can cancel
/// it without observing the epoch: this recomputes it from the scenario.
pub fn remove_background(
    scenario: &Scenario,
    received: &DMatrix<Complex64>,
    waveform: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let m = scenario.radar_len();
    if received.nrows() != m || waveform.nrows() != m {
        return Err(Error::invalid(
            "received block and waveform must both have one row per radar antenna",
        ));
    }
    if received.ncols() != waveform.ncols() {
        return Err(Error::invalid(
            "received block and waveform must have the same number of snapshots",
        ));
    }
    let rho_rc = path_gain_clutter(scenario, ClutterLink::RadarClutter, &PhaseDraw::zero());
    let a_rc = steering_2d(&scenario.angle_rc, &scenario.radar_geom);
    let h_rc = a_rc * rho_rc;
    Ok(received - &h_rc * (h_rc.transpose() * waveform))
}

/// Per-epoch powers `(target, clutter)` of the two surface echo
/// components, in mW per snapshot, without materializing the block.
///
/// Exploits the rank-1 structure of every link: both components factor as
/// an outer product of a fixed receive steering vector with a length-`M`
/// combining row, so only `N x M` products are ever formed.
pub fn echo_term_powers(
    scenario: &Scenario,
    theta: &DVector<Complex64>,
    waveform: &DMatrix<Complex64>,
    draw: &PhaseDraw,
) -> Result<(f64, f64)> {
    let m = scenario.radar_len();
    let n = scenario.irs_len();
    if theta.len() != n {
        return Err(Error::invalid(format!(
            "reflection vector has {} entries, surface has {n}",
            theta.len()
        )));
    }
    if waveform.nrows() != m {
        return Err(Error::invalid(format!(
            "waveform has {} rows, radar has {m} antennas",
            waveform.nrows()
        )));
    }
    let k = waveform.ncols() as f64;

    let a_i_ri = steering_2d(&scenario.angle_ri, &scenario.irs_geom);
    let a_i_ci = steering_2d(&scenario.angle_ci, &scenario.irs_geom);
    let a_r_ri = steering_2d(&scenario.angle_ri, &scenario.radar_geom);
    let a_r_rc = steering_2d(&scenario.angle_rc, &scenario.radar_geom);

    let rho_ri = path_gain_direct(scenario, draw);
    let rho_rc = path_gain_clutter(scenario, ClutterLink::RadarClutter, draw);
    let rho_ci = path_gain_clutter(scenario, ClutterLink::ClutterIrs, draw);

    // Row vectors (a ⊙ theta)^T applied to the combined inbound channel
    // C = rho_ri a_i(ri) a_r(ri)^T + rho_ci rho_rc a_i(ci) a_r(rc)^T:
    // each product collapses to two scalars times fixed steering rows.
    let weight = |a: &DVector<Complex64>| -> DVector<Complex64> {
        let wt1 = a.iter().zip(theta.iter()).zip(a_i_ri.iter()).fold(
            Complex64::new(0.0, 0.0),
            |acc, ((ai, ti), ri)| acc + ai * ti * ri,
        );
        let wt2 = a.iter().zip(theta.iter()).zip(a_i_ci.iter()).fold(
            Complex64::new(0.0, 0.0),
            |acc, ((ai, ti), ci)| acc + ai * ti * ci,
        );
        &a_r_ri * (rho_ri * wt1) + &a_r_rc * (rho_ci * rho_rc * wt2)
    };

    let y = weight(&a_i_ri);
    let z = weight(&a_i_ci);

    let sty = (waveform.transpose() * &y).norm_squared();
    let stz = (waveform.transpose() * &z).norm_squared();

    let m = m as f64;
    let p_target = rho_ri.norm_sqr() * m * sty / k;
    let p_clutter = (rho_rc * rho_ci).norm_sqr() * m * stz / k;
    Ok((p_target, p_clutter))
}

/// Sample statistics from a Monte-Carlo power run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean_target: f64,
    pub mean_clutter: f64,
    /// Standard error of `mean_target`.
    pub stderr_target: f64,
    /// Standard error of `mean_clutter`.
    pub stderr_clutter: f64,
    pub trials: u64,
}

/// Averages the per-epoch component powers over independent phase draws.
///
/// Trial `t` uses a generator seeded with `seed + t`, so any subset of
/// trials is reproducible in isolation.
pub fn monte_carlo_power(
    scenario: &Scenario,
    theta: &DVector<Complex64>,
    waveform: &DMatrix<Complex64>,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if trials < 2 {
        return Err(Error::invalid("need at least 2 trials for a standard error"));
    }
    let (mut sum_t, mut sum_c, mut sq_t, mut sq_c) = (0.0, 0.0, 0.0, 0.0);
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t));
        let draw = draw_phases(&mut rng);
        let (pt, pc) = echo_term_powers(scenario, theta, waveform, &draw)?;
        sum_t += pt;
        sum_c += pc;
        sq_t += pt * pt;
        sq_c += pc * pc;
    }
    let n = trials as f64;
    let mean_t = sum_t / n;
    let mean_c = sum_c / n;
    let var_t = (sq_t / n - mean_t * mean_t).max(0.0) * n / (n - 1.0);
    let var_c = (sq_c / n - mean_c * mean_c).max(0.0) * n / (n - 1.0);
    Ok(MonteCarloEstimate {
        mean_target: mean_t,
        mean_clutter: mean_c,
        stderr_target: (var_t / n).sqrt(),
        stderr_clutter: (var_c / n).sqrt(),
        trials,
    })
}
