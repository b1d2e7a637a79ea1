//! Human-unit configuration parsing.
//!
//! The config file speaks the units people write down — degrees, dB,
//! dBsm, meters, milliwatts — and this module converts them into the
//! linear-unit [`Scenario`] the rest of the workspace computes with.
//! Conversions happen here and only here. Every field is optional; an
//! empty file yields the reference scenario.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use spooflab_core::{scan_angle_pair, Scenario, UpaGeometry};

/// Power ratio from decibels (also maps dBsm to square meters).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Raw config file contents; every field optional, human units.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    /// Radar aperture, elements along x (default 8).
    pub antennas_x: Option<usize>,
    /// Radar aperture, elements along y (default 8).
    pub antennas_y: Option<usize>,
    /// Surface aperture, elements along x (default 11).
    pub elements_x: Option<usize>,
    /// Surface aperture, elements along y (default 11).
    pub elements_y: Option<usize>,
    /// Carrier wavelength in meters (default 0.05).
    pub wavelength_m: Option<f64>,
    /// Element spacing in meters (default half the wavelength).
    pub spacing_m: Option<f64>,
    /// Signed radar-to-surface angle in degrees (default -30).
    pub angle_radar_surface_deg: Option<f64>,
    /// Signed radar-to-clutter angle in degrees (default -52).
    pub angle_radar_clutter_deg: Option<f64>,
    /// Signed clutter-to-surface angle in degrees (default 22).
    pub angle_clutter_surface_deg: Option<f64>,
    /// Radar-to-surface distance in meters (default 100).
    pub dist_radar_surface_m: Option<f64>,
    /// Radar-to-clutter distance in meters (default 97).
    pub dist_radar_clutter_m: Option<f64>,
    /// Clutter-to-surface distance in meters (default 36).
    pub dist_clutter_surface_m: Option<f64>,
    /// Reference path gain at 1 m, in dB (default -30).
    pub path_gain_db: Option<f64>,
    /// Clutter cross-section in dBsm (default 7).
    pub clutter_rcs_dbsm: Option<f64>,
    /// Receiver noise power per sample in mW (default 0).
    pub noise_power_mw: Option<f64>,
    /// Detection threshold in mW (default 1e-7).
    pub threshold_mw: Option<f64>,
    /// Bare-target cross-section in dBsm for the surface-absent
    /// baseline (default 10).
    pub target_rcs_dbsm: Option<f64>,
    /// Scan averaging epochs (default 200).
    pub epochs: Option<usize>,
}

impl FileConfig {
    /// Parses a TOML config file. A missing or empty file is valid.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::from_str(&text).with_context(|| format!("in config file {}", path.display()))
    }

    /// Parses TOML text.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).context("malformed config")
    }

    /// Builds the linear-unit scenario, applying defaults per field.
    pub fn scenario(&self) -> Result<Scenario> {
        let wavelength = self.wavelength_m.unwrap_or(0.05);
        let spacing = self.spacing_m.unwrap_or(wavelength / 2.0);
        let radar_geom = UpaGeometry::new(
            self.antennas_x.unwrap_or(8),
            self.antennas_y.unwrap_or(8),
            spacing,
            wavelength,
        )?;
        let irs_geom = UpaGeometry::new(
            self.elements_x.unwrap_or(11),
            self.elements_y.unwrap_or(11),
            spacing,
            wavelength,
        )?;
        let scenario = Scenario::new(
            radar_geom,
            irs_geom,
            scan_angle_pair(self.angle_radar_surface_deg.unwrap_or(-30.0))?,
            scan_angle_pair(self.angle_radar_clutter_deg.unwrap_or(-52.0))?,
            scan_angle_pair(self.angle_clutter_surface_deg.unwrap_or(22.0))?,
            self.dist_radar_surface_m.unwrap_or(100.0),
            self.dist_radar_clutter_m.unwrap_or(97.0),
            self.dist_clutter_surface_m.unwrap_or(36.0),
            db_to_linear(self.path_gain_db.unwrap_or(-30.0)),
            db_to_linear(self.clutter_rcs_dbsm.unwrap_or(7.0)),
            self.noise_power_mw.unwrap_or(0.0),
            self.threshold_mw.unwrap_or(1e-7),
        )?;
        Ok(scenario)
    }

    /// Bare-target cross-section in square meters.
    pub fn target_rcs(&self) -> f64 {
        db_to_linear(self.target_rcs_dbsm.unwrap_or(10.0))
    }

    /// Scan averaging epochs.
    pub fn epochs(&self) -> usize {
        self.epochs.unwrap_or(200)
    }
}

/// Loads a scenario straight from a config file path.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    FileConfig::from_path(path)?.scenario()
}
