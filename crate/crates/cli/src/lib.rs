//! Library surface of the experiment runner: config loading and the
//! experiment drivers behind each CLI verb.

pub mod config;
pub mod experiments;

pub use config::{db_to_linear, load_scenario, FileConfig};
pub use experiments::{
    compute_delta_diff, default_delta_grid, default_scan_grid, derive_layout, parse_kind,
    run_angle_diff_sweep, run_aoa_scan, run_gamma_sweep, run_single_solve, run_validation,
    write_checks_csv, write_scan_csv, write_solve_csv, write_sweep_csv, CheckRow, ExperimentRow,
    GeometryLayout, ScanRow, SolveSummary, GAMMA_GRID_DEFAULT,
};
