use orlicz::OrliczError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("invalid mesh resolution {0}")]
    InvalidResolution(f64),
    #[error("degenerate element")]
    DegenerateElement,
    #[error("growth indices (i_B, s_B) = ({i_b}, {s_b}) violate 1 < i_B ≤ s_B < ∞")]
    InadmissibleIndices { i_b: f64, s_b: f64 },
    #[error("no convergence after {iterations} Newton steps, residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Neumann datum has mean {mean:e} after correction")]
    MassViolation { mean: f64 },
    #[error("Neumann datum violates the zero-mass compatibility condition: total {total:e}")]
    IncompatibleNeumannData { total: f64 },
    #[error("point mass at ({x}, {y}) is not strictly inside the domain")]
    PointMassOutside { x: f64, y: f64 },
    #[error("radial datum is not integrable: {0}")]
    NonIntegrableDatum(String),
    #[error("invalid operator weight: {0}")]
    InvalidWeight(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("datum size {got} does not match {expected} elements")]
    DatumMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Orlicz(#[from] OrliczError),
}
