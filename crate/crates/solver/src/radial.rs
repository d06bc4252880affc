use std::sync::Arc;

use numeric::{adaptive, lit, Real};
use orlicz::{converges_at_infinity, YoungFunction};

use crate::datum::Mollifier;
use crate::error::SolverError;

/// Radial right-hand sides on the ball `B_R ⊂ ℝⁿ`.
#[derive(Clone)]
pub enum RadialDatum<T> {
    PointMass { mass: T },
    Constant(T),
    /// `mass·kⁿρ(k r)`, the mollified point mass.
    Bump { mass: T, k: T, shape: Mollifier },
    Density(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: std::fmt::Debug> std::fmt::Debug for RadialDatum<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadialDatum::PointMass { mass } => write!(f, "PointMass({mass:?})"),
            RadialDatum::Constant(c) => write!(f, "Constant({c:?})"),
            RadialDatum::Bump { mass, k, shape } => write!(f, "Bump({mass:?}, {k:?}, {shape:?})"),
            RadialDatum::Density(_) => write!(f, "Density(..)"),
        }
    }
}

const REL: f64 = 1e-11;

/// Semi-analytic solution of the radial Dirichlet problem with Uhlenbeck structure.
///
/// With `F(r) = r^{1−n}∫₀^r s^{n−1} f(s) ds` the profile satisfies
/// `u′ = −sign(F)·b⁻¹(|F|)` and `u(R) = 0`.
#[derive(Clone, Debug)]
pub struct RadialProfile<T: Real> {
    young: YoungFunction<T>,
    datum: RadialDatum<T>,
    radius: T,
    n: usize,
    knots: Vec<T>,
    cum: Vec<T>,
}

fn sphere<T: Real>(n: usize) -> T {
    if n == 1 {
        lit(2.0)
    } else {
        T::PI() + T::PI()
    }
}

impl<T: Real> RadialProfile<T> {
    /// `F(r)`.
    pub fn flux(&self, r: T) -> T {
        let n = self.n;
        let rn1 = r.powi(n as i32 - 1);
        match &self.datum {
            RadialDatum::PointMass { mass } => *mass / (sphere::<T>(n) * rn1),
            RadialDatum::Constant(c) => *c * r / T::from_usize(n).unwrap(),
            RadialDatum::Bump { mass, k, shape } => {
                let support = T::one() / *k;
                if r >= support {
                    return *mass / (sphere::<T>(n) * rn1);
                }
                let dens = |s: T| s.powi(n as i32 - 1) * shape.scaled(n, *k, s);
                *mass * adaptive(dens, T::zero(), r, lit(1e-13), T::zero()).value / rn1
            }
            RadialDatum::Density(f) => {
                let dens = |s: T| s.powi(n as i32 - 1) * f(s);
                adaptive(dens, T::zero(), r, lit(1e-13), T::zero()).value / rn1
            }
        }
    }

    /// `|u′(r)| = b⁻¹(|F(r)|)`.
    pub fn gradient(&self, r: T) -> T {
        self.young.inverse_density(self.flux(r).abs())
    }

    /// Signed `u′(r)`.
    pub fn derivative(&self, r: T) -> T {
        let f = self.flux(r);
        let g = self.young.inverse_density(f.abs());
        if f > T::zero() {
            -g
        } else {
            g
        }
    }

    fn signed_integral(&self, a: T, b: T) -> T {
        adaptive(|r| -self.derivative(r), a, b, lit(REL), T::zero()).value
    }

    /// `u(r) = ∫_r^R −u′`; `+∞` at the centre when the integral diverges.
    pub fn value(&self, r: T) -> T {
        let r = r.abs().min(self.radius);
        let j = self.knots.partition_point(|k| *k <= r);
        if j == 0 {
            if r == T::zero() {
                return self.center_value();
            }
            return self.cum[0] + self.signed_integral(r, self.knots[0]);
        }
        if j == self.knots.len() {
            return T::zero();
        }
        self.cum[j] + self.signed_integral(r, self.knots[j])
    }

    /// `u(0)`, infinite for singular profiles.
    pub fn center_value(&self) -> T {
        if matches!(self.datum, RadialDatum::PointMass { .. })
            && self.n >= 2
            && !converges_at_infinity(&self.young, T::from_usize(self.n).unwrap())
        {
            return T::infinity();
        }
        let r0 = self.knots[0];
        let (g0, g1) = (self.gradient(r0), self.gradient(r0 * lit(0.5)));
        let a = if g0 > T::zero() { (g1 / g0).ln() / T::LN_2() } else { T::zero() };
        if a >= T::one() {
            return T::infinity();
        }
        self.cum[0] + r0 * g0 / (T::one() - a)
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn dimension(&self) -> usize {
        self.n
    }
}

/// Builds the profile on a geometric panel ladder from `R·10⁻¹⁰` to `R`.
pub fn radial_oracle<T: Real>(
    young: &YoungFunction<T>,
    datum: RadialDatum<T>,
    radius: T,
    n: usize,
) -> Result<RadialProfile<T>, SolverError> {
    if !(radius > T::zero()) || !(n == 1 || n == 2) {
        return Err(SolverError::NonIntegrableDatum(format!("need R > 0 and n ∈ {{1, 2}}, got R = {radius}, n = {n}")));
    }
    if let RadialDatum::Density(f) = &datum {
        let tot = adaptive(|s: T| s.powi(n as i32 - 1) * f(s).abs(), T::zero(), radius, lit(1e-10), T::zero());
        if !tot.value.is_finite() {
            return Err(SolverError::NonIntegrableDatum("∫ s^{n−1}|f| diverges".into()));
        }
    }
    let mut knots: Vec<T> = Vec::new();
    let r_min = radius * lit(1e-10);
    let steps = 400;
    for i in 0..=steps {
        knots.push(r_min * (radius / r_min).powf(T::from_usize(i).unwrap() / T::from_usize(steps).unwrap()));
    }
    if let RadialDatum::Bump { k, .. } = &datum {
        let s = T::one() / *k;
        if s < radius {
            knots.push(s);
        }
    }
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    *knots.last_mut().unwrap() = radius;
    let mut prof = RadialProfile { young: young.clone(), datum, radius, n, knots, cum: Vec::new() };
    let m = prof.knots.len();
    let mut cum = vec![T::zero(); m];
    for j in (0..m - 1).rev() {
        cum[j] = cum[j + 1] + prof.signed_integral(prof.knots[j], prof.knots[j + 1]);
    }
    prof.cum = cum;
    Ok(prof)
}
