//! Pass/fail numerical checks of the estimates behind existence and
//! uniqueness of approximable solutions, run on [`solver::ApproximationRun`]s.
//!
//! Every check returns a [`CheckReport`] holding the verdict, the measured
//! constants, the tolerances and the table behind the verdict. The
//! [`controls`] module builds corrupted inputs on which each check must fail.

mod band;
mod budget;
mod cauchy;
pub mod controls;
mod decay;
mod discrete;
mod monotone;
mod regularity;
mod report;
mod truncation;
mod uniqueness;

pub use band::{band_energy, check_band_energy, datum_above};
pub use budget::{check_gradient_budget, SUP_OVER_MEDIAN};
pub use cauchy::check_cauchy_in_measure;
pub use decay::{check_level_decay, DecayBranch, C_SLACK};
pub use monotone::check_monotonicity_trick;
pub use regularity::{auto_window, compare_fields, compare_regularity, MIN_CELLS, SLOPE_REL_TOL};
pub use report::{write_reports, CheckReport};
pub use truncation::{check_truncation_energy, truncated_energy, REL_SLACK};
pub use uniqueness::check_uniqueness;

