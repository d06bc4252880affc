use std::fmt;

use numeric::{lit, Real};

use crate::error::OrliczError;
use crate::sobolev::SobolevParams;

/// Target space of a regularity statement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularityClass<T> {
    /// `L^{q,∞}(log L)^{log}(log log L)^{log_log}`.
    Weak { q: T, log: T, log_log: T },
    /// `exp L^γ`.
    Exponential { gamma: T },
    /// `exp exp L`.
    DoubleExponential,
    /// `L^∞`.
    Bounded,
}

impl<T: Real> RegularityClass<T> {
    /// Power exponent of the weak class, which fixes the distribution slope `−q`.
    pub fn weak_exponent(&self) -> Option<T> {
        match self {
            RegularityClass::Weak { q, .. } => Some(*q),
            _ => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, RegularityClass::Bounded)
    }
}

fn num<T: Real>(x: T) -> String {
    let v = x.to_f64_lossy();
    let r = (v * 1e6).round() / 1e6;
    let s = if r == r.trunc() { format!("{}", r as i64) } else { format!("{r}") };
    s.replace('-', "−")
}

impl<T: Real> fmt::Display for RegularityClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityClass::Weak { q, log, log_log } => {
                write!(f, "L^{{{},∞}}", num(*q))?;
                if *log != T::zero() {
                    write!(f, "(log L)^{{{}}}", num(*log))?;
                }
                if *log_log != T::zero() {
                    write!(f, "(log log L)^{{{}}}", num(*log_log))?;
                }
                Ok(())
            }
            RegularityClass::Exponential { gamma } => {
                if *gamma == T::one() {
                    write!(f, "exp L")
                } else {
                    write!(f, "exp L^{{{}}}", num(*gamma))
                }
            }
            RegularityClass::DoubleExponential => write!(f, "exp exp L"),
            RegularityClass::Bounded => write!(f, "L^∞"),
        }
    }
}

/// Predicted classes for `u`, for `∇u` and the alternative gradient class from `Θ = b^{n′}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T> {
    pub u: RegularityClass<T>,
    pub grad: RegularityClass<T>,
    pub grad_theta: RegularityClass<T>,
}

impl<T: Real> fmt::Display for Prediction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u: {}; ∇u: {}", self.u, self.grad)
    }
}

/// Tabulated classes for `B(t) ≈ t^p (log t)^β` near infinity.
pub fn predict_regularity<T: Real>(p: T, beta: T, params: &SobolevParams<T>) -> Result<Prediction<T>, OrliczError> {
    let s = params.sigma;
    let one = T::one();
    let zero = T::zero();
    if !(p.is_finite() && p > one) {
        return Err(OrliczError::OutOfTable(format!("p = {p} must exceed 1")));
    }
    if !(beta.is_finite() && beta >= zero) {
        return Err(OrliczError::OutOfTable(format!("beta = {beta} must be non-negative")));
    }
    let tol: T = lit(1e-12);
    let crit = (p - s).abs() <= tol * s;
    let sm1 = s - one;
    let (u, grad) = if p < s && !crit {
        (
            RegularityClass::Weak { q: s * (p - one) / (s - p), log: beta * p / (s - p), log_log: zero },
            RegularityClass::Weak { q: s * (p - one) / sm1, log: beta / sm1, log_log: zero },
        )
    } else if crit && beta < sm1 - tol {
        (
            RegularityClass::Exponential { gamma: sm1 / (sm1 - beta) },
            RegularityClass::Weak { q: s, log: beta * s / sm1 - one, log_log: zero },
        )
    } else if crit && (beta - sm1).abs() <= tol {
        (RegularityClass::DoubleExponential, RegularityClass::Weak { q: s, log: sm1, log_log: -one })
    } else {
        (RegularityClass::Bounded, RegularityClass::Weak { q: s, log: beta, log_log: zero })
    };
    let grad_theta = if params.n >= 2 {
        let nf = T::from_usize(params.n).unwrap();
        let np = nf / (nf - one);
        RegularityClass::Weak { q: np * (p - one), log: np * beta, log_log: zero }
    } else {
        RegularityClass::Bounded
    };
    Ok(Prediction { u, grad, grad_theta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lip(n: usize) -> SobolevParams<f64> {
        SobolevParams::lipschitz(n).unwrap()
    }

    #[test]
    fn subcritical_row() {
        let pr = predict_regularity(1.5, 0.0, &lip(2)).unwrap();
        assert_eq!(pr.to_string(), "u: L^{2,∞}; ∇u: L^{1,∞}");
        assert_eq!(pr.grad_theta.weak_exponent(), Some(1.0));
    }

    #[test]
    fn critical_row() {
        let pr = predict_regularity(2.0, 0.0, &lip(2)).unwrap();
        assert_eq!(pr.to_string(), "u: exp L; ∇u: L^{2,∞}(log L)^{−1}");
        assert_eq!(pr.grad_theta.weak_exponent(), Some(2.0));
    }

    #[test]
    fn borderline_and_supercritical_rows() {
        let pr = predict_regularity(2.0, 1.0, &lip(2)).unwrap();
        assert_eq!(pr.u, RegularityClass::DoubleExponential);
        assert_eq!(pr.grad.to_string(), "L^{2,∞}(log L)^{1}(log log L)^{−1}");
        let pr = predict_regularity(4.0, 0.0, &lip(2)).unwrap();
        assert!(pr.u.is_bounded());
        assert_eq!(pr.grad.weak_exponent(), Some(2.0));
        assert_eq!(pr.grad_theta.weak_exponent(), Some(6.0));
        let pr = predict_regularity(2.0, 3.0, &lip(2)).unwrap();
        assert!(pr.u.is_bounded());
        assert_eq!(pr.grad.to_string(), "L^{2,∞}(log L)^{3}");
    }

    #[test]
    fn user_sigma_rows() {
        let pr = predict_regularity(3.0, 0.0, &SobolevParams::new(2, 4.0).unwrap()).unwrap();
        assert_eq!(pr.u.weak_exponent(), Some(8.0));
        assert_eq!(pr.grad.to_string(), "L^{8/3,∞}".replace("8/3", &num(8.0 / 3.0)));
        let pr = predict_regularity(1.5, 1.0, &SobolevParams::new(2, 3.0).unwrap()).unwrap();
        assert_eq!(pr.u.to_string(), "L^{1,∞}(log L)^{1}");
    }

    #[test]
    fn out_of_table() {
        assert!(matches!(predict_regularity(1.0, 0.0, &lip(2)), Err(OrliczError::OutOfTable(_))));
        assert!(matches!(predict_regularity(2.0, -1.0, &lip(2)), Err(OrliczError::OutOfTable(_))));
    }
}
