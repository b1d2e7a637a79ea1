//! Scenario description and line-of-sight channel construction.
//!
//! A scenario fixes the radar and surface apertures, the three
//! radar / surface / clutter directions with their distances, the
//! reference path gain, the clutter radar cross section, the noise floor
//! and the detection threshold. All quantities are linear units here
//! (meters, milliwatts, square meters); dB conversions belong to the
//! configuration layer.
//!
//! Channels are pure line of sight:
//!
//! * radar to surface: `G = rho_ri * a_i(ri) * a_r(ri)^T` (an `N x M`
//!   rank-1 outer product, transpose rather than conjugate transpose),
//! * radar to clutter: `h_rc = rho_rc * a_r(rc)`,
//! * clutter to surface: `h_ci = rho_ci * a_i(ci)`.
//!
//! The radar-to-surface and clutter-to-surface gains carry independent
//! phases drawn uniformly per coherence epoch; the radar-to-clutter gain
//! has the deterministic phase `2 pi d_rc / lambda`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{steering_2d, AnglePair, UpaGeometry};

/// Full physical description of one spoofing setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Radar aperture.
    pub radar_geom: UpaGeometry,
    /// Reflecting surface aperture.
    pub irs_geom: UpaGeometry,
    /// Radar <-> surface direction (same pair on both ends of the link).
    pub angle_ri: AnglePair,
    /// Radar -> clutter direction.
    pub angle_rc: AnglePair,
    /// Clutter -> surface direction.
    pub angle_ci: AnglePair,
    /// Radar <-> surface distance (m).
    pub dist_ri: f64,
    /// Radar <-> clutter distance (m).
    pub dist_rc: f64,
    /// Clutter <-> surface distance (m).
    pub dist_ci: f64,
    /// Reference path gain at 1 m (linear power ratio).
    pub ref_gain: f64,
    /// Clutter radar cross section (m^2, linear).
    pub clutter_rcs: f64,
    /// Receiver noise power per complex sample (mW).
    pub noise_power: f64,
    /// Detection threshold for received echo power (mW).
    pub threshold: f64,
}

impl Scenario {
    /// Validates field ranges and cross-field consistency.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        radar_geom: UpaGeometry,
        irs_geom: UpaGeometry,
        angle_ri: AnglePair,
        angle_rc: AnglePair,
        angle_ci: AnglePair,
        dist_ri: f64,
        dist_rc: f64,
        dist_ci: f64,
        ref_gain: f64,
        clutter_rcs: f64,
        noise_power: f64,
        threshold: f64,
    ) -> Result<Self> {
        for (name, d) in [("dist_ri", dist_ri), ("dist_rc", dist_rc), ("dist_ci", dist_ci)] {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {d}")));
            }
        }
        if !(ref_gain > 0.0 && ref_gain <= 1.0) {
            return Err(Error::invalid(format!(
                "reference path gain must lie in (0, 1], got {ref_gain}"
            )));
        }
        if !(clutter_rcs > 0.0) || !clutter_rcs.is_finite() {
            return Err(Error::invalid(format!(
                "clutter RCS must be positive, got {clutter_rcs}"
            )));
        }
        if !(noise_power >= 0.0) || !noise_power.is_finite() {
            return Err(Error::invalid(format!(
                "noise power must be non-negative, got {noise_power}"
            )));
        }
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(Error::invalid(format!(
                "detection threshold must be positive, got {threshold}"
            )));
        }
        if radar_geom.wavelength != irs_geom.wavelength {
            return Err(Error::invalid(
                "radar and surface apertures must share one carrier wavelength",
            ));
        }
        Ok(Scenario {
            radar_geom,
            irs_geom,
            angle_ri,
            angle_rc,
            angle_ci,
            dist_ri,
            dist_rc,
            dist_ci,
            ref_gain,
            clutter_rcs,
            noise_power,
            threshold,
        })
    }

    /// Radar antenna count `M`.
    pub fn radar_len(&self) -> usize {
        self.radar_geom.len()
    }

    /// Surface element count `N`.
    pub fn irs_len(&self) -> usize {
        self.irs_geom.len()
    }

    /// Carrier wavelength (m).
    pub fn wavelength(&self) -> f64 {
        self.radar_geom.wavelength
    }

    /// Same scenario with a different detection threshold (mW).
    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(Error::invalid(format!(
                "detection threshold must be positive, got {threshold}"
            )));
        }
        let mut s = self.clone();
        s.threshold = threshold;
        Ok(s)
    }
}

impl Default for Scenario {
    /// Reference setup: 8x8 radar, 11x11 surface, half-wavelength spacing
    /// at 0.05 m carrier, target 100 m out at -30 degrees, clutter 97 m at
    /// -52 degrees and 36 m from the target, -30 dB reference gain, 7 dBsm
    /// clutter RCS, noiseless receiver, 1e-7 mW detection threshold.
    fn default() -> Self {
        let wavelength = 0.05;
        Scenario::new(
            UpaGeometry::half_wavelength(8, 8, wavelength).expect("static geometry"),
            UpaGeometry::half_wavelength(11, 11, wavelength).expect("static geometry"),
            AnglePair::from_degrees(30.0, 180.0).expect("static angle"),
            AnglePair::from_degrees(52.0, 180.0).expect("static angle"),
            AnglePair::from_degrees(22.0, 0.0).expect("static angle"),
            100.0,
            97.0,
            36.0,
            1e-3,
            10f64.powf(0.7),
            0.0,
            1e-7,
        )
        .expect("static scenario")
    }
}

/// Random channel phases for one coherence epoch, uniform on `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDraw {
    /// Phase of the radar <-> surface gain.
    pub nu_ri: f64,
    /// Phase of the clutter <-> surface gain.
    pub nu_ci: f64,
}

impl PhaseDraw {
    /// Both phases zero; handy for deterministic single-draw checks.
    pub fn zero() -> Self {
        PhaseDraw { nu_ri: 0.0, nu_ci: 0.0 }
    }
}

/// Draws the two epoch phases, `nu_ri` first, from the supplied generator.
pub fn draw_phases<R: Rng + ?Sized>(rng: &mut R) -> PhaseDraw {
    PhaseDraw { nu_ri: rng.gen_range(0.0..TAU), nu_ci: rng.gen_range(0.0..TAU) }
}

/// Which clutter-adjacent hop a path gain refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClutterLink {
    /// Radar <-> clutter.
    RadarClutter,
    /// Clutter <-> surface.
    ClutterIrs,
}

/// Radar <-> surface gain: magnitude `sqrt(alpha) / d_ri`, phase `nu_ri`.
pub fn path_gain_direct(scenario: &Scenario, draw: &PhaseDraw) -> Complex64 {
    Complex64::from_polar(scenario.ref_gain.sqrt() / scenario.dist_ri, draw.nu_ri)
}

/// Clutter-hop gain: magnitude `sqrt(kappa * alpha) / d`.
///
/// The radar <-> clutter hop has the deterministic phase
/// `2 pi d_rc / lambda`; the clutter <-> surface hop carries `nu_ci`.
pub fn path_gain_clutter(scenario: &Scenario, link: ClutterLink, draw: &PhaseDraw) -> Complex64 {
    let amp = (scenario.clutter_rcs * scenario.ref_gain).sqrt();
    match link {
        ClutterLink::RadarClutter => Complex64::from_polar(
            amp / scenario.dist_rc,
            TAU * scenario.dist_rc / scenario.wavelength(),
        ),
        ClutterLink::ClutterIrs => Complex64::from_polar(amp / scenario.dist_ci, draw.nu_ci),
    }
}

/// The three line-of-sight channels of one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Radar to surface, `N x M`.
    pub g_ri: DMatrix<Complex64>,
    /// Radar to clutter, length `M`.
    pub h_rc: DVector<Complex64>,
    /// Clutter to surface, length `N`.
    pub h_ci: DVector<Complex64>,
}

/// Materializes the three channels for one epoch.
pub fn build_channels(scenario: &Scenario, draw: &PhaseDraw) -> ChannelSet {
    let a_i_ri = steering_2d(&scenario.angle_ri, &scenario.irs_geom);
    let a_r_ri = steering_2d(&scenario.angle_ri, &scenario.radar_geom);
    let a_r_rc = steering_2d(&scenario.angle_rc, &scenario.radar_geom);
    let a_i_ci = steering_2d(&scenario.angle_ci, &scenario.irs_geom);

    let rho_ri = path_gain_direct(scenario, draw);
    let rho_rc = path_gain_clutter(scenario, ClutterLink::RadarClutter, draw);
    let rho_ci = path_gain_clutter(scenario, ClutterLink::ClutterIrs, draw);

    ChannelSet {
        g_ri: (&a_i_ri * a_r_ri.transpose()) * rho_ri,
        h_rc: a_r_rc * rho_rc,
        h_ci: a_i_ci * rho_ci,
    }
}
