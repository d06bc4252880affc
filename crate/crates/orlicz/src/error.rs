use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrliczError {
    #[error("density decreases near t = {at:e}")]
    NonMonotoneDensity { at: f64 },
    #[error("density vanishes identically")]
    DegenerateDensity,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("upper growth index is unbounded along the declared tail")]
    IndexUnbounded,
    #[error("parameters outside the tabulated examples: {0}")]
    OutOfTable(String),
}
