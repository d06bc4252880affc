use numeric::Real;
use orlicz::{growth_indices, GrowthIndices, YoungFunction};

use crate::error::SolverError;

/// Bounded spatial coefficient `a(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight<T> {
    Uniform(T),
    /// `a_lo` where `⌊x/period⌋` is even, `a_hi` otherwise.
    Stripes { a_lo: T, a_hi: T, period: T },
}

impl<T: Real> Weight<T> {
    pub fn at(&self, x: [T; 2]) -> T {
        match *self {
            Weight::Uniform(a) => a,
            Weight::Stripes { a_lo, a_hi, period } => {
                let k = (x[0] / period).floor().to_i64().unwrap_or(0);
                if k.rem_euclid(2) == 0 {
                    a_lo
                } else {
                    a_hi
                }
            }
        }
    }

    pub fn bounds(&self) -> (T, T) {
        match *self {
            Weight::Uniform(a) => (a, a),
            Weight::Stripes { a_lo, a_hi, .. } => (a_lo.min(a_hi), a_lo.max(a_hi)),
        }
    }
}

/// Uhlenbeck operator `𝒜(x, ξ) = a(x)·b(|ξ|)·ξ/|ξ|`.
#[derive(Debug, Clone)]
pub struct OperatorField<T: Real> {
    young: YoungFunction<T>,
    weight: Weight<T>,
    indices: Option<GrowthIndices<T>>,
}

impl<T: Real> OperatorField<T> {
    pub fn new(young: YoungFunction<T>, weight: Weight<T>) -> Result<Self, SolverError> {
        let (lo, hi) = weight.bounds();
        if !(lo > T::zero() && hi.is_finite()) {
            return Err(SolverError::InvalidWeight(format!("bounds ({lo}, {hi}) must satisfy 0 < a_min ≤ a_max < ∞")));
        }
        let indices = match growth_indices(&young) {
            Ok(ix) => Some(ix),
            Err(orlicz::OrliczError::IndexUnbounded) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(OperatorField { young, weight, indices })
    }

    pub fn uniform(young: YoungFunction<T>) -> Result<Self, SolverError> {
        Self::new(young, Weight::Uniform(T::one()))
    }

    pub fn young(&self) -> &YoungFunction<T> {
        &self.young
    }

    pub fn weight(&self) -> &Weight<T> {
        &self.weight
    }

    /// `None` when `s_B = ∞`.
    pub fn indices(&self) -> Option<GrowthIndices<T>> {
        self.indices
    }

    /// Factor `c` such that `𝒜(x, ξ)·ξ ≥ c·B(|ξ|)`; the ellipticity constant after rescaling.
    pub fn ellipticity(&self) -> T {
        self.weight.bounds().0.min(T::one())
    }

    /// Fails unless `1 < i_B ≤ s_B < ∞`.
    pub fn require_admissible(&self) -> Result<(), SolverError> {
        match self.indices {
            Some(ix) if ix.admissible() => Ok(()),
            Some(ix) => Err(SolverError::InadmissibleIndices { i_b: ix.i_b.to_f64_lossy(), s_b: ix.s_b.to_f64_lossy() }),
            None => Err(SolverError::InadmissibleIndices { i_b: f64::NAN, s_b: f64::INFINITY }),
        }
    }
}
