use numeric::Real;

use crate::error::OrliczError;
use crate::young::YoungFunction;

/// Lower and upper growth indices `(i_B, s_B)` of `t·b(t)/B(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthIndices<T> {
    pub i_b: T,
    pub s_b: T,
}

impl<T: Real> GrowthIndices<T> {
    /// `1 < i_B` and `s_B < ∞`, the standing hypothesis for the solver.
    pub fn admissible(&self) -> bool {
        self.i_b > T::one() && self.s_b.is_finite()
    }
}

/// Extremizes `t·b(t)/B(t)` over the grid nodes and both declared tails.
pub fn growth_indices<T: Real>(b: &YoungFunction<T>) -> Result<GrowthIndices<T>, OrliczError> {
    let tails = b.tails();
    if !tails.upper.is_finite() {
        return Err(OrliczError::IndexUnbounded);
    }
    let g = b.grid();
    let mut lo = tails.lower.min(tails.upper);
    let mut hi = tails.lower.max(tails.upper);
    for j in 0..g.t.len() {
        if g.big_b[j] > T::zero() {
            let r = g.t[j] * g.b[j] / g.big_b[j];
            if !r.is_finite() {
                return Err(OrliczError::IndexUnbounded);
            }
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok(GrowthIndices { i_b: lo.max(T::one()), s_b: hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{make_young, DensitySpec};

    #[test]
    fn pure_powers() {
        for p in [1.5f64, 2.0, 4.0] {
            let g = growth_indices(&make_young(&DensitySpec::PowerLaw { p }).unwrap()).unwrap();
            assert!((g.i_b - p).abs() < 1e-9 && (g.s_b - p).abs() < 1e-9);
        }
    }

    #[test]
    fn quadratic_plus_quartic() {
        let b = make_young(&DensitySpec::PowerSum { terms: vec![(2.0f64, 1.0), (4.0, 3.0)] }).unwrap();
        let g = growth_indices(&b).unwrap();
        assert!((g.i_b - 2.0).abs() <= 1e-3, "{g:?}");
        assert!((g.s_b - 4.0).abs() <= 1e-3, "{g:?}");
        assert!(g.admissible());
    }

    #[test]
    fn linear_head_is_inadmissible() {
        let b = make_young(&DensitySpec::PiecewiseDensity { breakpoints: vec![1.0f64], exponents: vec![0.0, 1.0] }).unwrap();
        let g = growth_indices(&b).unwrap();
        assert_eq!(g.i_b, 1.0f64);
        assert!(!g.admissible());
    }
}
