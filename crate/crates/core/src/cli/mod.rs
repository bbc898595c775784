//! Scenario runner behind the `dipole-optics` binary: parse a scenario
//! file, run the requested pipelines, write CSV tables and a summary.

mod run;
mod scenario;

pub use run::{
    exit_code, exit_code_for_error, format_float, run_scenario, Check, Report, Trajectory, EXIT_CONFIG, EXIT_PASS,
    EXIT_RUNTIME, EXIT_TOLERANCE,
};
pub use scenario::{parse_scenario, GridParams, Mode, Scenario, Tolerances};
