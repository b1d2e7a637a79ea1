//! Simulation and optimization toolkit for IRS-aided radar spoofing.

// Validation uses `!(x > 0.0)` throughout so NaN fails the same branch
// as an out-of-range value.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bruteforce;
pub mod channel;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod linalg;
pub mod mm;
pub mod power;
pub mod receiver;
pub mod sdr;

pub use bruteforce::{enumerate_best, BruteForceResult, ENUMERATION_BUDGET};
pub use channel::{
    build_channels, draw_phases, path_gain_clutter, path_gain_direct, ChannelSet, ClutterLink,
    PhaseDraw, Scenario,
};
pub use error::{Error, Result};
pub use forms::{build_quadratic_forms, lambda_max_rank2, QuadraticForms};
pub use geometry::{angle_grid, scan_angle_pair, steering_1d, steering_2d, AnglePair, UpaGeometry};
pub use mm::{
    feasibility_restore, mm_step, solve_mm, solve_mu_bisection, surrogate_terms, theta_opt,
    MmConfig, SolverReport, SurrogateTerms,
};
pub use receiver::{
    bare_target_echo, bartlett_spectrum, make_theta, scan_pipeline, spatial_covariance,
    BaselineKind, SpectrumScan,
};
pub use sdr::{gaussian_randomization, solve_sdp, solve_sdr, AdmmConfig, SdpSolution};

pub use power::{
    cascaded_vectors, echo_term_powers, identity_waveform, mean_power_clutter, mean_power_target,
    monte_carlo_power, q_factors, qpsk_waveform, remove_background, simulate_echo,
    CascadedCoefficients, EchoBatch, MonteCarloEstimate, ReflectionMode, ReflectionVector,
};
