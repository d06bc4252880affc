//! Config-driven experiments: build a problem from a TOML file, run the
//! approximation schedule, run the verification checks, and write snapshots,
//! rearrangement tables, reports, a summary and plots.

pub mod config;
mod experiment;
mod plot;
mod predict;

pub use config::{load_config, parse_check_list, parse_config, ConfigError, ExperimentConfig, CHECKS};
pub use experiment::{build_problem, decay_start, level_field, run_experiment, Outcome, Provenance, RunError, RunOptions, Stage, SummaryRow};
pub use predict::list_predictions;

/// Configs shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 5] = [
    ("laplace-1d-smoke", include_str!("../configs/laplace-1d-smoke.toml")),
    ("dirac-p15-disc", include_str!("../configs/dirac-p15-disc.toml")),
    ("dirac-p4-disc", include_str!("../configs/dirac-p4-disc.toml")),
    ("neumann-dipole-square", include_str!("../configs/neumann-dipole-square.toml")),
    ("gaussian-uniqueness-disc", include_str!("../configs/gaussian-uniqueness-disc.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
