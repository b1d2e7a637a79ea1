//! Uniform planar arrays and their steering vectors.
//!
//! Both the radar aperture and the reflecting surface are modelled as
//! uniform planar arrays (UPAs) lying in the x-y plane of their own local
//! frame. A direction is described by an [`AnglePair`] (elevation from
//! boresight plus azimuth), and the corresponding array response is the
//! Kronecker product of two uniform linear array factors, the x factor
//! first:
//!
//! ```text
//! a(theta, eta) = e(cos(eta) sin(theta), Nx)  (x)  e(sin(eta) sin(theta), Ny)
//! ```
//!
//! where `e(phi, N)` has k-th entry `exp(-j 2 pi (d / lambda) k phi)`.

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Propagation direction relative to an array's local frame.
///
/// `elevation` is measured from boresight in `[-pi/2, pi/2]`;
/// `azimuth` lies in `[0, 2 pi)`. Radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    pub elevation: f64,
    pub azimuth: f64,
}

impl AnglePair {
    pub fn new(elevation: f64, azimuth: f64) -> Result<Self> {
        if !elevation.is_finite() || elevation.abs() > PI / 2.0 {
            return Err(Error::invalid(format!(
                "elevation must lie in [-pi/2, pi/2], got {elevation}"
            )));
        }
        if !azimuth.is_finite() || !(0.0..TAU).contains(&azimuth) {
            return Err(Error::invalid(format!(
                "azimuth must lie in [0, 2*pi), got {azimuth}"
            )));
        }
        Ok(AnglePair { elevation, azimuth })
    }

    /// Convenience constructor taking degrees.
    pub fn from_degrees(elevation_deg: f64, azimuth_deg: f64) -> Result<Self> {
        Self::new(elevation_deg.to_radians(), azimuth_deg.to_radians())
    }

    /// Phase-difference arguments `(phi_x, phi_y)` of the two array factors.
    pub fn phase_args(&self) -> (f64, f64) {
        let s = self.elevation.sin();
        (self.azimuth.cos() * s, self.azimuth.sin() * s)
    }
}

/// A signed in-plane scan angle in degrees, mapped onto an [`AnglePair`].
///
/// Negative angles are represented with azimuth `pi`, non-negative ones
/// with azimuth `0`, so that the effective x-axis phase argument equals
/// `sin(signed angle)` throughout the scan.
pub fn scan_angle_pair(signed_deg: f64) -> Result<AnglePair> {
    let azimuth = if signed_deg < 0.0 { PI } else { 0.0 };
    AnglePair::new(signed_deg.abs().to_radians(), azimuth)
}

/// Geometry of a uniform planar array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpaGeometry {
    /// Elements along the local x axis.
    pub count_x: usize,
    /// Elements along the local y axis.
    pub count_y: usize,
    /// Inter-element spacing (m).
    pub spacing: f64,
    /// Carrier wavelength (m).
    pub wavelength: f64,
}

impl UpaGeometry {
    pub fn new(count_x: usize, count_y: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        if count_x == 0 || count_y == 0 {
            return Err(Error::invalid("array element counts must be at least 1"));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid(format!("spacing must be positive, got {spacing}")));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::invalid(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(UpaGeometry { count_x, count_y, spacing, wavelength })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(count_x: usize, count_y: usize, wavelength: f64) -> Result<Self> {
        Self::new(count_x, count_y, wavelength / 2.0, wavelength)
    }

    /// Total number of elements.
    pub fn len(&self) -> usize {
        self.count_x * self.count_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Uniform linear array factor `e(phi, count)`.
///
/// Entry `k` is `exp(-j 2 pi (spacing / wavelength) k phi)`; entry 0 is 1.
pub fn steering_1d(phase_diff: f64, count: usize, spacing: f64, wavelength: f64) -> Result<DVector<Complex64>> {
    if count == 0 {
        return Err(Error::invalid("steering vector needs at least one element"));
    }
    if !(spacing > 0.0) || !(wavelength > 0.0) {
        return Err(Error::invalid("spacing and wavelength must be positive"));
    }
    if !phase_diff.is_finite() {
        return Err(Error::invalid(format!("phase difference must be finite, got {phase_diff}")));
    }
    let rate = -TAU * spacing / wavelength * phase_diff;
    Ok(DVector::from_fn(count, |k, _| Complex64::from_polar(1.0, rate * k as f64)))
}

/// UPA steering vector for the direction `angles`.
///
/// Kronecker product of the x-axis and y-axis array factors, x first, so
/// entry `k_x * count_y + k_y` has phase `-2 pi (d / lambda) (k_x phi_x + k_y phi_y)`.
pub fn steering_2d(angles: &AnglePair, geom: &UpaGeometry) -> DVector<Complex64> {
    let (phi_x, phi_y) = angles.phase_args();
    let ex = steering_1d(phi_x, geom.count_x, geom.spacing, geom.wavelength)
        .expect("validated geometry");
    let ey = steering_1d(phi_y, geom.count_y, geom.spacing, geom.wavelength)
        .expect("validated geometry");
    let mut out = DVector::zeros(geom.len());
    for kx in 0..geom.count_x {
        for ky in 0..geom.count_y {
            out[kx * geom.count_y + ky] = ex[kx] * ey[ky];
        }
    }
    out
}

/// Inclusive scan grid in degrees.
///
/// Returns `start, start + step, ...` up to and including `stop` (the end
/// point is kept when it lands within a half step of the grid).
pub fn angle_grid(start_deg: f64, stop_deg: f64, step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg > 0.0) || !step_deg.is_finite() {
        return Err(Error::invalid(format!("grid step must be positive, got {step_deg}")));
    }
    if !(start_deg <= stop_deg) {
        return Err(Error::invalid(format!(
            "grid start {start_deg} must not exceed stop {stop_deg}"
        )));
    }
    let count = ((stop_deg - start_deg) / step_deg + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| start_deg + step_deg * i as f64).collect())
}
