use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RearrangeError {
    #[error("field has no cells")]
    EmptyField,
    #[error("cell {index} has non-positive or non-finite measure {measure}")]
    BadMeasure { index: usize, measure: f64 },
    #[error("cell {index} has a non-finite value")]
    BadValue { index: usize },
    #[error("fit window has {usable} usable dyadic levels, need at least {needed}")]
    EmptyWindow { usable: usize, needed: usize },
}
