//! Scalar abstraction and the handful of numerical kernels (quadrature,
//! monotone root bracketing, least-squares slopes) used across the workspace.

pub mod fit;
pub mod logcum;
pub mod quad;
pub mod roots;
mod scalar;

pub use fit::{ls_slope, LineFit};
pub use logcum::{ln_integral_exp, LogCumulative};
pub use quad::{adaptive, adaptive_graded, adaptive_to_infinity, gauss_kronrod, QuadResult};
pub use roots::{bisect_increasing, bracket_increasing};
pub use scalar::{lit, Real};
