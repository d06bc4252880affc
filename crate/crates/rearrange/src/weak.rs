use numeric::{ls_slope, Real};

use crate::error::RearrangeError;
use crate::field::{distribution, DiscreteField};

pub const MIN_LEVELS: usize = 8;

/// Result of fitting the distribution function of a field against a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakFit<T> {
    /// `max_j |{|u| > t_j}|·w(t_j)` over the usable dyadic levels.
    pub sup_proxy: T,
    /// Least-squares slope of `ln |{|u| > t}|` against `ln t`.
    pub fitted_slope: T,
    /// Minus the least-squares slope of `ln w` on the same levels.
    pub predicted_slope: T,
    /// Usable `(t_j, |{|u| > t_j}|)` pairs.
    pub levels: Vec<(T, T)>,
}

impl<T: Real> WeakFit<T> {
    pub fn slope_error(&self) -> T {
        (self.fitted_slope - self.predicted_slope).abs()
    }

    /// Membership verdict with a relative tolerance on the predicted slope.
    pub fn agrees(&self, rel_tol: T) -> bool {
        self.slope_error() <= rel_tol * self.predicted_slope.abs()
    }
}

/// Dyadic ladder `t_lo·2ʲ ≤ t_hi`.
pub fn dyadic_levels<T: Real>(t_lo: T, t_hi: T) -> Vec<T> {
    let two = T::one() + T::one();
    let mut out = Vec::new();
    let mut t = t_lo;
    while t <= t_hi * (T::one() + T::epsilon() * numeric::lit(16.0)) {
        out.push(t);
        t = t * two;
    }
    out
}

/// Fits `|{|u| > t}|` on the dyadic ladder of `window` and compares against `weight`.
pub fn weak_fit<T: Real>(
    u: &DiscreteField<T>,
    weight: impl Fn(T) -> T,
    window: (T, T),
) -> Result<WeakFit<T>, RearrangeError> {
    let levels: Vec<(T, T)> = dyadic_levels(window.0, window.1)
        .into_iter()
        .map(|t| (t, distribution(u, t)))
        .filter(|&(_, mu)| mu > T::zero())
        .collect();
    if levels.len() < MIN_LEVELS {
        return Err(RearrangeError::EmptyWindow { usable: levels.len(), needed: MIN_LEVELS });
    }
    let lt: Vec<T> = levels.iter().map(|(t, _)| t.ln()).collect();
    let lmu: Vec<T> = levels.iter().map(|(_, mu)| mu.ln()).collect();
    let lw: Vec<T> = levels.iter().map(|&(t, _)| weight(t).ln()).collect();
    let fitted = ls_slope(&lt, &lmu).expect("distinct levels").slope;
    let wslope = ls_slope(&lt, &lw).expect("distinct levels").slope;
    let sup_proxy = levels.iter().map(|&(t, mu)| mu * weight(t)).fold(T::zero(), |a, b| a.max(b));
    Ok(WeakFit { sup_proxy, fitted_slope: fitted, predicted_slope: -wslope, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder() {
        assert_eq!(dyadic_levels(1.0, 8.0), vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(dyadic_levels(1.0, 7.9).len(), 3);
    }

    #[test]
    fn too_few_levels() {
        let u = DiscreteField::from_cells(&[(10.0, 1.0)]).unwrap();
        let err = weak_fit(&u, |t: f64| t, (1.0, 1000.0)).unwrap_err();
        assert_eq!(err, RearrangeError::EmptyWindow { usable: 4, needed: 8 });
    }
}
