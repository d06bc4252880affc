//! Measure-theoretic tools on piecewise-constant fields.
//!
//! A [`DiscreteField`] is a list of `(value, measure)` cells. Everything here
//! is exact on such fields: the decreasing rearrangement is a finite
//! [`StepFunction`], distribution functions are finite sums, and tail
//! integrals are partial sums of the sorted cells.

mod error;
mod field;
mod step;
mod weak;

pub use error::RearrangeError;
pub use field::{distribution, median, rearrangement, tail_integral, truncate, truncate_value, DiscreteField};
pub use step::StepFunction;
pub use weak::{dyadic_levels, weak_fit, WeakFit, MIN_LEVELS};

pub type Field = DiscreteField<f64>;
pub type Step = StepFunction<f64>;
pub type Fit = WeakFit<f64>;
