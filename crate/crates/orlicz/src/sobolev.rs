use std::sync::Arc;

use numeric::{LogCumulative, adaptive, adaptive_graded, adaptive_to_infinity, lit, Real};

use crate::error::OrliczError;
use crate::young::{conjugate, near_zero_modification, YoungFunction};

/// Dimension `n` and isoperimetric exponent `σ ≥ n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevParams<T> {
    pub n: usize,
    pub sigma: T,
}

impl<T: Real> SobolevParams<T> {
    pub fn new(n: usize, sigma: T) -> Result<Self, OrliczError> {
        if n == 0 {
            return Err(OrliczError::InvalidParameter("dimension must be at least 1".into()));
        }
        let nf = T::from_usize(n).unwrap();
        if !(sigma.is_finite() && sigma >= nf) {
            return Err(OrliczError::InvalidParameter(format!("sigma = {sigma} must satisfy sigma >= n = {n}")));
        }
        if !(sigma > T::one()) {
            return Err(OrliczError::InvalidParameter("sigma must exceed 1".into()));
        }
        Ok(Self { n, sigma })
    }

    /// Lipschitz domains: `σ = n`.
    pub fn lipschitz(n: usize) -> Result<Self, OrliczError> {
        Self::new(n, T::from_usize(n).unwrap())
    }

    /// `σ′ = σ/(σ − 1)`.
    pub fn sigma_prime(&self) -> T {
        self.sigma / (self.sigma - T::one())
    }
}

const REL: f64 = 1e-12;
const SCALE: f64 = 1e-12;

/// Whether `∫₀ (t/B(t))^{1/(σ−1)} dt` converges.
pub fn converges_at_zero<T: Real>(b: &YoungFunction<T>, sigma: T) -> bool {
    b.tails().lower < sigma
}

/// Whether `∫^∞ (t/B(t))^{1/(σ−1)} dt` converges, i.e. `B_σ` blows up at a finite argument.
pub fn converges_at_infinity<T: Real>(b: &YoungFunction<T>, sigma: T) -> bool {
    let t = b.tails();
    let tol: T = lit(1e-12);
    if (t.upper - sigma).abs() <= tol * sigma {
        t.upper_log > sigma - T::one()
    } else {
        t.upper > sigma
    }
}

/// Sobolev conjugate `B_σ = B ∘ H_σ⁻¹` with `H_σ = φ_σ^{1/σ′}`.
///
/// Carries the possibly modified `B` and the function `φ_σ` tabulated in
/// `u = ln s`, with log-domain continuation beyond the table.
#[derive(Debug, Clone)]
pub struct SobolevConjugate<T: Real> {
    base: YoungFunction<T>,
    modified: bool,
    sigma: T,
    sp: T,
    inv_sm1: T,
    u: Vec<T>,
    phi: Vec<T>,
    head_exp: T,
    ln_phi_inf: Option<T>,
    tail: Arc<LogCumulative<T>>,
}

impl<T: Real> SobolevConjugate<T> {
    pub fn base(&self) -> &YoungFunction<T> {
        &self.base
    }

    /// Whether the near-zero modification `t·B(1)` on `[0, 1]` was applied.
    pub fn modified(&self) -> bool {
        self.modified
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn sigma_prime(&self) -> T {
        self.sp
    }

    fn h(&self, v: T) -> T {
        v + self.inv_sm1 * (v - self.base.ln_value(v))
    }

    fn g(&self, t: T) -> T {
        (self.inv_sm1 * (t.ln() - self.base.ln_value(t.ln()))).exp()
    }

    /// `ln φ_σ(eᵘ)`.
    pub fn ln_phi(&self, u: T) -> T {
        let last = self.u.len() - 1;
        if u <= self.u[0] {
            return self.phi[0].ln() + self.head_exp * (u - self.u[0]);
        }
        if u <= self.u[last] {
            let j = self.u.partition_point(|x| *x <= u) - 1;
            let extra = adaptive(|t| self.g(t), self.u[j].exp(), u.exp(), lit(REL), T::zero()).value;
            return (self.phi[j] + extra).ln();
        }
        let h = |v: T| self.h(v);
        if let Some(v) = self.tail.eval(&h, u, lit(REL)) {
            return v;
        }
        let ul = self.u[last];
        let (hl, hu) = (self.h(ul), self.h(u));
        let href = hl.max(hu);
        let r = adaptive_graded(|v| (self.h(v) - href).exp(), ul, u, hu >= hl, lit(REL), T::zero()).value;
        let tail = href + r.ln();
        let base = self.phi[last].ln();
        let m = base.max(tail);
        m + ((base - m).exp() + (tail - m).exp()).ln()
    }

    /// `φ_σ(s) = ∫₀ˢ (t/B(t))^{1/(σ−1)} dt`.
    pub fn phi(&self, s: T) -> T {
        if !(s > T::zero()) {
            return T::zero();
        }
        self.ln_phi(s.ln()).exp()
    }

    /// `H_σ(s) = φ_σ(s)^{1/σ′}`.
    pub fn h_sigma(&self, s: T) -> T {
        if !(s > T::zero()) {
            return T::zero();
        }
        (self.ln_phi(s.ln()) / self.sp).exp()
    }

    /// `ln φ_σ(∞)` when finite.
    pub fn ln_phi_infinity(&self) -> Option<T> {
        self.ln_phi_inf
    }

    /// Threshold `t*` beyond which `B_σ = +∞`.
    pub fn blowup(&self) -> Option<T> {
        self.ln_phi_inf.map(|l| (l / self.sp).exp())
    }

    /// `ln φ_σ⁻¹(eʸ)`; `None` when `eʸ ≥ φ_σ(∞)`.
    pub fn ln_phi_inverse(&self, y: T) -> Option<T> {
        if let Some(inf) = self.ln_phi_inf {
            if y >= inf {
                return None;
            }
        }
        let last = self.u.len() - 1;
        let l0 = self.phi[0].ln();
        if y <= l0 {
            return Some(self.u[0] + (y - l0) / self.head_exp);
        }
        let (mut lo, mut hi);
        if y <= self.phi[last].ln() {
            let j = self.phi.partition_point(|p| p.ln() < y);
            lo = self.u[j.saturating_sub(1)];
            hi = self.u[j.min(last)];
        } else {
            lo = self.u[last];
            let mut step = T::one();
            hi = lo + step;
            while self.ln_phi(hi) < y {
                lo = hi;
                step += step;
                hi = hi + step;
                if hi > lit(1e12) {
                    return None;
                }
            }
        }
        let tiny = T::epsilon() * lit(4.0);
        for _ in 0..200 {
            let mid = lo + (hi - lo) * lit(0.5);
            if mid <= lo || mid >= hi || hi - lo <= tiny * hi.abs().max(T::one()) {
                break;
            }
            if self.ln_phi(mid) >= y {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// `ln B_σ(t)`; `+∞` at and beyond the blow-up threshold.
    pub fn ln_value(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::neg_infinity();
        }
        match self.ln_phi_inverse(self.sp * t.ln()) {
            None => T::infinity(),
            Some(u) => self.base.ln_value(u),
        }
    }

    /// `B_σ(t)`.
    pub fn value(&self, t: T) -> T {
        self.ln_value(t).exp()
    }

    /// Logarithmic derivative `d ln B_σ / d ln t`, computed without forming `B_σ`.
    pub fn elasticity(&self, t: T) -> T {
        match self.ln_phi_inverse(self.sp * t.ln()) {
            None => T::infinity(),
            Some(u) => {
                let eps_b = (u + self.base.ln_density(u) - self.base.ln_value(u)).exp();
                self.sp * eps_b * (self.ln_phi(u) - self.h(u)).exp()
            }
        }
    }
}

/// Builds `B_σ`, modifying `B` near zero first when `φ_σ` diverges there.
pub fn sobolev_conjugate<T: Real>(b: &YoungFunction<T>, params: &SobolevParams<T>) -> SobolevConjugate<T> {
    let sigma = params.sigma;
    let modified = !converges_at_zero(b, sigma);
    let base = if modified { near_zero_modification(b) } else { b.clone() };
    let inv_sm1 = T::one() / (sigma - T::one());
    let gs = base.grid_spec();
    let (u0, u1) = (gs.t_min.ln(), gs.t_max.ln());
    let per_decade = 128usize;
    let n = ((gs.t_max / gs.t_min).log10().to_f64_lossy() * per_decade as f64).round().max(1.0) as usize;
    let du = (u1 - u0) / T::from_usize(n).unwrap();
    let u: Vec<T> = (0..=n).map(|j| u0 + du * T::from_usize(j).unwrap()).collect();
    let head_exp = T::one() + inv_sm1 * (T::one() - base.tails().lower);
    let mut sc = SobolevConjugate {
        base,
        modified,
        sigma,
        sp: params.sigma_prime(),
        inv_sm1,
        u,
        phi: Vec::new(),
        head_exp,
        ln_phi_inf: None,
        tail: Arc::new(LogCumulative::new(T::zero(), T::zero(), lit(0.25), 0)),
    };
    let t0 = sc.u[0].exp();
    let mut acc = sc.g(t0) * t0 / head_exp;
    let mut phi = Vec::with_capacity(sc.u.len());
    phi.push(acc);
    for w in sc.u.windows(2) {
        let (a, c) = (w[0].exp(), w[1].exp());
        let knot = T::one();
        acc += if sc.modified && a < knot && knot < c {
            adaptive(|t| sc.g(t), a, knot, lit(REL), T::zero()).value
                + adaptive(|t| sc.g(t), knot, c, lit(REL), T::zero()).value
        } else {
            adaptive(|t| sc.g(t), a, c, lit(REL), T::zero()).value
        };
        phi.push(acc);
    }
    sc.tail = Arc::new(LogCumulative::new(*sc.u.last().unwrap(), phi.last().unwrap().ln(), lit(0.25), 400_000));
    sc.phi = phi;
    if converges_at_infinity(b, sigma) {
        let ul = *sc.u.last().unwrap();
        let hl = sc.h(ul);
        let r = adaptive_to_infinity(|w| (sc.h(ul + w) - hl).exp(), T::zero(), lit(REL), lit(SCALE));
        let base = sc.phi.last().unwrap().ln();
        let tail = hl + r.value.ln();
        let m = base.max(tail);
        sc.ln_phi_inf = Some(m + ((base - m).exp() + (tail - m).exp()).ln());
    }
    sc
}

/// The weights `φ_σ`, `Φ_σ(t) = B(φ_σ⁻¹(t))/t`, `Ψ_σ(t) = B(t)/φ_σ(t)` and `Θ(t) = b(t)^{n′}`.
#[derive(Debug, Clone)]
pub struct RegularityWeights<T: Real> {
    sc: SobolevConjugate<T>,
    original: YoungFunction<T>,
    n: usize,
}

impl<T: Real> RegularityWeights<T> {
    pub fn sobolev(&self) -> &SobolevConjugate<T> {
        &self.sc
    }

    pub fn phi_sigma(&self, s: T) -> T {
        self.sc.phi(s)
    }

    /// `ln Φ_σ(eˡ)`; `+∞` beyond `φ_σ(∞)`.
    pub fn ln_big_phi(&self, l: T) -> T {
        match self.sc.ln_phi_inverse(l) {
            None => T::infinity(),
            Some(u) => self.sc.base.ln_value(u) - l,
        }
    }

    pub fn big_phi(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        self.ln_big_phi(t.ln()).exp()
    }

    /// `ln Ψ_σ(eˡ)`.
    pub fn ln_psi(&self, l: T) -> T {
        self.sc.base.ln_value(l) - self.sc.ln_phi(l)
    }

    pub fn psi(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        self.ln_psi(t.ln()).exp()
    }

    /// `ln Θ(eˡ)` with `n′ = n/(n − 1)`; undefined for `n = 1`.
    pub fn ln_theta(&self, l: T) -> T {
        if self.n < 2 {
            return T::nan();
        }
        let nf = T::from_usize(self.n).unwrap();
        nf / (nf - T::one()) * self.original.ln_density(l)
    }

    pub fn theta(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        self.ln_theta(t.ln()).exp()
    }
}

pub fn regularity_weights<T: Real>(b: &YoungFunction<T>, params: &SobolevParams<T>) -> RegularityWeights<T> {
    RegularityWeights { sc: sobolev_conjugate(b, params), original: b.clone(), n: params.n }
}

/// `F_σ(t) = t^{σ′}∫_t^∞ B̃(s)s^{−1−σ′}ds` and `G_σ(s) = s/F_σ⁻¹(s)`.
#[derive(Debug, Clone)]
pub struct SupBoundFunctions<T: Real> {
    conj: YoungFunction<T>,
    sp: T,
}

/// Result of [`sup_bound_functions`]: the pair `(F_σ, G_σ)` or the divergence flag.
#[derive(Debug, Clone)]
pub enum SupBound<T: Real> {
    Finite(SupBoundFunctions<T>),
    DivergentFlag,
}

impl<T: Real> SupBound<T> {
    pub fn finite(&self) -> Option<&SupBoundFunctions<T>> {
        match self {
            SupBound::Finite(f) => Some(f),
            SupBound::DivergentFlag => None,
        }
    }
}

impl<T: Real> SupBoundFunctions<T> {
    /// `ln F_σ(eˡ)`.
    pub fn ln_f(&self, l: T) -> T {
        let sp = self.sp;
        let integrand = |w: T| self.conj.ln_value(l + w) - sp * w;
        let mut reference = T::neg_infinity();
        let mut w = T::zero();
        for _ in 0..12 {
            reference = reference.max(integrand(w));
            w = if w == T::zero() { T::one() } else { w + w };
        }
        if reference == T::neg_infinity() {
            return T::neg_infinity();
        }
        let r = adaptive_to_infinity(|w| (integrand(w) - reference).exp(), T::zero(), lit(1e-11), lit(1e-14));
        reference + r.value.ln()
    }

    pub fn f(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        self.ln_f(t.ln()).exp()
    }

    /// `F_σ⁻¹(s)` by bisection in `ln t`.
    pub fn f_inverse(&self, s: T) -> T {
        if !(s > T::zero()) {
            return T::zero();
        }
        let y = s.ln();
        let (mut lo, mut hi) = (-T::one(), T::one());
        let mut step = T::one();
        while self.ln_f(lo) >= y {
            hi = lo;
            lo -= step;
            step += step;
        }
        step = T::one();
        while self.ln_f(hi) < y {
            lo = hi;
            hi += step;
            step += step;
        }
        let tiny = T::epsilon() * lit(8.0);
        for _ in 0..200 {
            let mid = lo + (hi - lo) * lit(0.5);
            if mid <= lo || mid >= hi || hi - lo <= tiny * hi.abs().max(T::one()) {
                break;
            }
            if self.ln_f(mid) >= y {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi.exp()
    }

    /// `G_σ(s) = s/F_σ⁻¹(s)` with `G_σ(0) = 0`.
    pub fn g(&self, s: T) -> T {
        if !(s > T::zero()) {
            return T::zero();
        }
        s / self.f_inverse(s)
    }
}

pub fn sup_bound_functions<T: Real>(b: &YoungFunction<T>, params: &SobolevParams<T>) -> SupBound<T> {
    if !converges_at_infinity(b, params.sigma) {
        return SupBound::DivergentFlag;
    }
    SupBound::Finite(SupBoundFunctions { conj: conjugate(b), sp: params.sigma_prime() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{make_young, DensitySpec};

    fn power(p: f64) -> YoungFunction<f64> {
        make_young(&DensitySpec::PowerLaw { p }).unwrap()
    }

    fn log_slope(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (f(b) - f(a)) / (b - a)
    }

    #[test]
    fn subcritical_power_exponent() {
        let p = SobolevParams::lipschitz(2).unwrap();
        let sc = sobolev_conjugate(&power(1.5), &p);
        assert!(!sc.modified());
        assert!(sc.blowup().is_none());
        let s = log_slope(|l| sc.ln_value(f64::exp(l)), 0.0, 10.0);
        assert!((s - 6.0).abs() <= 1e-3, "slope {s}");
        assert!((sc.elasticity(3.0) - 6.0).abs() <= 1e-3);
    }

    #[test]
    fn phi_is_h_to_the_sigma_prime() {
        let p = SobolevParams::new(2, 3.0).unwrap();
        let sc = sobolev_conjugate(&make_young(&DensitySpec::PowerLog { p: 2.0, beta: 0.5 }).unwrap(), &p);
        for s in [1e-5f64, 0.3, 2.0, 4e3, 1e9] {
            let lhs = sc.phi(s);
            let rhs = sc.h_sigma(s).powf(sc.sigma_prime());
            assert!((lhs - rhs).abs() <= 1e-8 * lhs);
        }
    }

    #[test]
    fn phi_matches_closed_form() {
        let p = SobolevParams::lipschitz(2).unwrap();
        let sc = sobolev_conjugate(&power(1.5), &p);
        for s in [1e-9f64, 1e-3, 0.5, 10.0, 1e6, 1e12] {
            let exact = 3.0 * s.sqrt();
            assert!((sc.phi(s) - exact).abs() <= 1e-8 * exact, "s = {s}");
        }
    }

    #[test]
    fn supercritical_power_blows_up() {
        let p = SobolevParams::lipschitz(2).unwrap();
        let sc = sobolev_conjugate(&power(4.0), &p);
        assert!(sc.modified());
        let t_star = sc.blowup().expect("finite threshold");
        assert!(t_star.is_finite() && t_star > 0.0);
        assert!(sc.value(0.5 * t_star).is_finite());
        assert_eq!(sc.value(t_star * 1.0001), f64::INFINITY);
    }

    #[test]
    fn critical_power_grows_faster_than_powers() {
        let p = SobolevParams::lipschitz(2).unwrap();
        let sc = sobolev_conjugate(&power(2.0), &p);
        assert!(sc.modified());
        assert!(sc.blowup().is_none());
        let e = sc.elasticity(1e3);
        assert!(e > 20.0, "elasticity {e}");
        let fd = log_slope(|l| sc.ln_value(f64::exp(l)), 1e3f64.ln() - 1e-4, 1e3f64.ln() + 1e-4);
        assert!((fd - e).abs() <= 1e-3 * e, "{fd} vs {e}");
    }

    #[test]
    fn weights_for_subcritical_power() {
        let w = regularity_weights(&power(1.5), &SobolevParams::lipschitz(2).unwrap());
        let phi_slope = log_slope(|l| w.ln_big_phi(l), 5.0, 25.0);
        let psi_slope = log_slope(|l| w.ln_psi(l), 5.0, 25.0);
        let theta_slope = log_slope(|l| w.ln_theta(l), 5.0, 25.0);
        assert!((phi_slope - 2.0).abs() < 1e-6, "{phi_slope}");
        assert!((psi_slope - 1.0).abs() < 1e-6, "{psi_slope}");
        assert!((theta_slope - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sup_bounds_for_cubic() {
        let p = SobolevParams::lipschitz(2).unwrap();
        let sb = sup_bound_functions(&power(3.0), &p);
        let f = sb.finite().expect("convergent");
        let fs = log_slope(|l| f.ln_f(l), 0.0, 4.0);
        assert!((fs - 1.5).abs() <= 1e-3, "{fs}");
        let gs = (f.g(1e4).ln() - f.g(1e2).ln()) / (1e4f64.ln() - 1e2f64.ln());
        assert!((gs - 1.0 / 3.0).abs() <= 1e-3, "{gs}");
        assert_eq!(f.g(0.0), 0.0);
        let mut prev = 0.0f64;
        for k in -6i32..8 {
            let v = f.f(2f64.powi(k));
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn sup_bounds_diverge_for_small_p() {
        let p = SobolevParams::lipschitz(2).unwrap();
        for q in [1.5, 2.0] {
            assert!(matches!(sup_bound_functions(&power(q), &p), SupBound::DivergentFlag));
        }
    }

    #[test]
    fn params_validation() {
        assert!(SobolevParams::new(2, 1.5f64).is_err());
        assert!(SobolevParams::new(1, 1.0f64).is_err());
        assert!((SobolevParams::new(3, 3.0f64).unwrap().sigma_prime() - 1.5).abs() < 1e-15);
    }
}
