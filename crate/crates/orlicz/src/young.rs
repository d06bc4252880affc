use std::sync::{Arc, OnceLock};

use numeric::{LogCumulative, adaptive, adaptive_graded, lit, Real};

use crate::error::OrliczError;

/// How the density `b` of a Young function is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec<T> {
    /// `b(t) = t^{p−1}`, so `B(t) = t^p/p`.
    PowerLaw { p: T },
    /// `b(t) = t^{p−1}·log(e + t)^β`.
    PowerLog { p: T, beta: T },
    /// `b(t) = t^{e₀}` on `(0, t₁]`, then `b(tᵢ)·(t/tᵢ)^{eᵢ}` on `(tᵢ, tᵢ₊₁]`.
    ///
    /// `exponents` has one more entry than `breakpoints`.
    PiecewiseDensity { breakpoints: Vec<T>, exponents: Vec<T> },
    /// `b(t) = Σ cᵢ·t^{eᵢ}` given as `(cᵢ, eᵢ)` pairs.
    PowerSum { terms: Vec<(T, T)> },
    /// Non-decreasing samples of `b` on a logarithmic grid over `[t_min, t_max]`
    /// with power-law extrapolation exponents of `b` at both ends.
    Tabulated { t_min: T, t_max: T, values: Vec<T>, lo_exponent: T, hi_exponent: T },
}

/// Logarithmic evaluation grid carried by every Young function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub t_min: T,
    pub t_max: T,
    pub per_decade: usize,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self { t_min: lit(1e-8), t_max: lit(1e8), per_decade: 1024 }
    }
}

/// Node values `t_j`, `b(t_j)` and the cumulative `B(t_j)`.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    pub t: Vec<T>,
    pub b: Vec<T>,
    pub big_b: Vec<T>,
}

impl<T: Real> Grid<T> {
    /// Whether the difference quotients of `B` are non-decreasing up to `rel_tol`.
    pub fn is_convex(&self, rel_tol: T) -> bool {
        let q: Vec<T> = self
            .t
            .windows(2)
            .zip(self.big_b.windows(2))
            .map(|(t, b)| (b[1] - b[0]) / (t[1] - t[0]))
            .collect();
        q.windows(2).all(|w| w[1] >= w[0] - rel_tol * w[0].abs())
    }
}

/// Power-law exponents of `B` near zero and near infinity, plus the
/// logarithmic exponent near infinity (`B ≈ t^upper·(log t)^upper_log`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tails<T> {
    pub lower: T,
    pub upper: T,
    pub upper_log: T,
}

#[derive(Debug)]
enum Density<T: Real> {
    Power { p: T },
    PowerLog { p: T, beta: T },
    Piecewise { knots: Vec<T>, exps: Vec<T>, b_at: Vec<T>, big_b_at: Vec<T> },
    PowerSum { terms: Vec<(T, T)> },
    Tabulated { u0: T, du: T, b: Vec<T>, cum: Vec<T>, lo: T, hi: T },
    Head { knot: T, slope: T, inner: YoungFunction<T> },
    Inverse(YoungFunction<T>),
}

#[derive(Debug)]
struct Inner<T: Real> {
    density: Density<T>,
    tails: Tails<T>,
    grid_spec: GridSpec<T>,
    grid: OnceLock<Grid<T>>,
    tail: OnceLock<LogCumulative<T>>,
}

/// Convex Young function `B(t) = ∫₀ᵗ b` with non-decreasing density `b`.
///
/// Cheap to clone; all state is immutable and shared.
#[derive(Debug, Clone)]
pub struct YoungFunction<T: Real>(Arc<Inner<T>>);

const QUAD_REL: f64 = 1e-13;

fn ln_e_plus_exp<T: Real>(u: T) -> T {
    if u > T::one() {
        u + (T::one() - u).exp().ln_1p()
    } else {
        (T::E() + u.exp()).ln()
    }
}

fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln(1 − eˣ)` for `x ≤ 0`.
fn ln_1m_exp<T: Real>(x: T) -> T {
    if x > -T::LN_2() {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

impl<T: Real> YoungFunction<T> {
    fn wrap(density: Density<T>, tails: Tails<T>, grid_spec: GridSpec<T>) -> Self {
        YoungFunction(Arc::new(Inner { density, tails, grid_spec, grid: OnceLock::new(), tail: OnceLock::new() }))
    }

    /// Power-law and logarithmic tail exponents of `B`.
    pub fn tails(&self) -> Tails<T> {
        self.0.tails
    }

    pub fn grid_spec(&self) -> GridSpec<T> {
        self.0.grid_spec
    }

    /// Closed-form `p` when `B(t) = t^p/p` exactly.
    pub fn power_exponent(&self) -> Option<T> {
        match &self.0.density {
            Density::Power { p } => Some(*p),
            _ => None,
        }
    }

    /// The density `b(t)`.
    pub fn density(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        match &self.0.density {
            Density::Power { p } => t.powf(*p - T::one()),
            Density::PowerLog { p, beta } => t.powf(*p - T::one()) * ln_e_plus_exp(t.ln()).powf(*beta),
            Density::Piecewise { knots, exps, b_at, .. } => {
                let i = knots.partition_point(|k| *k < t);
                if i == 0 {
                    t.powf(exps[0])
                } else {
                    b_at[i - 1] * (t / knots[i - 1]).powf(exps[i])
                }
            }
            Density::PowerSum { terms } => terms.iter().map(|&(c, e)| c * t.powf(e)).sum(),
            Density::Tabulated { u0, du, b, lo, hi, .. } => {
                let u = t.ln();
                let last = b.len() - 1;
                let ulast = *u0 + *du * T::from_usize(last).unwrap();
                if u <= *u0 {
                    b[0] * (u - *u0).exp().powf(*lo)
                } else if u >= ulast {
                    b[last] * (u - ulast).exp().powf(*hi)
                } else {
                    let x = (u - *u0) / *du;
                    let j = x.floor().to_usize().unwrap_or(0).min(last - 1);
                    tab_density(*u0, *du, b, j, t)
                }
            }
            Density::Head { knot, slope, inner } => {
                if t <= *knot {
                    *slope
                } else {
                    inner.density(t)
                }
            }
            Density::Inverse(parent) => parent.inverse_density(t),
        }
    }

    /// Right derivative `b′(t)`; `+∞` where `b` has a vertical tangent.
    pub fn density_slope(&self, t: T) -> T {
        if !(t > T::zero()) {
            return match &self.0.density {
                Density::Power { p } | Density::PowerLog { p, .. } if *p > lit(2.0) => T::zero(),
                Density::Power { p } if *p == lit(2.0) => T::one(),
                _ => self.density_slope(T::min_positive_value().sqrt()),
            };
        }
        match &self.0.density {
            Density::Power { p } => (*p - T::one()) * t.powf(*p - lit(2.0)),
            Density::PowerLog { p, beta } => {
                let l = ln_e_plus_exp(t.ln());
                self.density(t) * ((*p - T::one()) / t + *beta / ((T::E() + t) * l))
            }
            Density::Piecewise { knots, exps, .. } => {
                let i = knots.partition_point(|k| *k <= t);
                exps[i] * self.density(t) / t
            }
            Density::PowerSum { terms } => terms
                .iter()
                .filter(|(_, e)| *e != T::zero())
                .map(|&(c, e)| c * e * t.powf(e - T::one()))
                .sum(),
            Density::Head { knot, inner, .. } => {
                if t < *knot {
                    T::zero()
                } else {
                    inner.density_slope(t)
                }
            }
            Density::Tabulated { .. } | Density::Inverse(_) => {
                let d: T = lit(1e-6);
                let (lo, hi) = (t * (T::one() - d), t * (T::one() + d));
                (self.density(hi) - self.density(lo)) / (hi - lo)
            }
        }
    }

    /// `ln b(eᵘ)`, finite far beyond the range where `b` itself is representable.
    pub fn ln_density(&self, u: T) -> T {
        match &self.0.density {
            Density::Power { p } => (*p - T::one()) * u,
            Density::PowerLog { p, beta } => (*p - T::one()) * u + *beta * ln_e_plus_exp(u).ln(),
            Density::Piecewise { knots, exps, b_at, .. } => {
                let i = knots.partition_point(|k| k.ln() < u);
                if i == 0 {
                    exps[0] * u
                } else {
                    b_at[i - 1].ln() + exps[i] * (u - knots[i - 1].ln())
                }
            }
            Density::PowerSum { terms } => terms
                .iter()
                .filter(|(c, _)| *c > T::zero())
                .fold(T::neg_infinity(), |acc, &(c, e)| log_add_exp(acc, c.ln() + e * u)),
            Density::Tabulated { u0, du, b, lo, hi, .. } => {
                let last = b.len() - 1;
                let ulast = *u0 + *du * T::from_usize(last).unwrap();
                if u <= *u0 {
                    b[0].ln() + *lo * (u - *u0)
                } else if u >= ulast {
                    b[last].ln() + *hi * (u - ulast)
                } else {
                    self.density(u.exp()).ln()
                }
            }
            Density::Head { knot, slope, inner } => {
                if u <= knot.ln() {
                    slope.ln()
                } else {
                    inner.ln_density(u)
                }
            }
            Density::Inverse(parent) => parent.ln_inverse_density(u),
        }
    }

    /// `B(t)`.
    pub fn value(&self, t: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        match &self.0.density {
            Density::Power { p } => t.powf(*p) / *p,
            Density::PowerSum { terms } => {
                terms.iter().map(|&(c, e)| c * t.powf(e + T::one()) / (e + T::one())).sum()
            }
            Density::Piecewise { knots, exps, b_at, big_b_at } => {
                let i = knots.partition_point(|k| *k < t);
                if i == 0 {
                    t.powf(exps[0] + T::one()) / (exps[0] + T::one())
                } else {
                    let (k, e) = (knots[i - 1], exps[i]);
                    big_b_at[i - 1] + b_at[i - 1] * k / (e + T::one()) * ((t / k).powf(e + T::one()) - T::one())
                }
            }
            Density::Tabulated { u0, du, b, cum, lo, hi } => tab_value(*u0, *du, b, cum, *lo, *hi, t),
            Density::PowerLog { .. } => self.value_from_grid(t),
            Density::Head { knot, slope, inner } => {
                if t <= *knot {
                    *slope * t
                } else {
                    inner.value(t) - inner.value(*knot) + *slope * *knot
                }
            }
            Density::Inverse(parent) => {
                let tau = parent.inverse_density(t);
                if tau <= T::zero() {
                    return T::zero();
                }
                (t * tau - parent.value(tau)).max(T::zero())
            }
        }
    }

    /// `ln B(eᵘ)`, valid for arguments whose `B` would overflow.
    pub fn ln_value(&self, u: T) -> T {
        match &self.0.density {
            Density::Power { p } => *p * u - p.ln(),
            Density::PowerSum { terms } => terms
                .iter()
                .filter(|(c, _)| *c > T::zero())
                .fold(T::neg_infinity(), |acc, &(c, e)| {
                    log_add_exp(acc, c.ln() - (e + T::one()).ln() + (e + T::one()) * u)
                }),
            Density::Inverse(parent) => {
                let ltau = parent.ln_inverse_density(u);
                if ltau == T::neg_infinity() {
                    return T::neg_infinity();
                }
                let r = parent.ln_value(ltau) - u - ltau;
                u + ltau + ln_1m_exp(r.min(T::zero()))
            }
            Density::Head { knot, slope, inner } => {
                if u <= knot.ln() {
                    return slope.ln() + u;
                }
                let li = inner.ln_value(u);
                let c = inner.value(*knot) - *slope * *knot;
                li + (-c * (-li).exp()).ln_1p()
            }
            Density::PowerLog { p, beta } if u > lit(600.0) => {
                let l = ln_e_plus_exp(u);
                let mut term = T::one();
                let mut sum = T::one();
                for k in 0..12 {
                    let kf = T::from_usize(k).unwrap();
                    term = -term * (*beta - kf) / (*p * l);
                    sum += term;
                    if term.abs() < T::epsilon() {
                        break;
                    }
                }
                *p * u + *beta * l.ln() - p.ln() + sum.ln()
            }
            Density::Piecewise { knots, exps, b_at, big_b_at } if !knots.is_empty() && u > lit(600.0) => {
                let i = knots.len() - 1;
                closed_tail_ln(knots[i], b_at[i], big_b_at[i], exps[i + 1], u)
            }
            Density::Tabulated { u0, du, b, cum, hi, .. } if u > lit(600.0) => {
                let last = b.len() - 1;
                let tl = (*u0 + *du * T::from_usize(last).unwrap()).exp();
                closed_tail_ln(tl, b[last], cum[last], *hi, u)
            }
            _ => {
                let lim: T = lit(600.0);
                if u < lim {
                    let v = self.value(u.exp());
                    if v.is_finite() {
                        return v.ln();
                    }
                }
                if u >= self.0.grid_spec.t_max.ln() {
                    return self.ln_beyond_grid(u);
                }
                let u0 = self.0.grid_spec.t_max.ln().min(u);
                let base = self.value(u0.exp()).ln();
                log_add_exp(base, self.ln_tail_integral(u0, u))
            }
        }
    }

    /// `ln B(eᵘ)` for `eᵘ ≥ t_max`, accumulated on a cached table in `u`.
    fn ln_beyond_grid(&self, u: T) -> T {
        let u0 = self.0.grid_spec.t_max.ln();
        let table = self.0.tail.get_or_init(|| {
            let b0 = match self.0.density {
                Density::PowerLog { .. } => *self.grid().big_b.last().unwrap(),
                _ => self.value(self.0.grid_spec.t_max),
            };
            LogCumulative::new(u0, b0.ln(), lit(0.25), 400_000)
        });
        let h = |v: T| v + self.ln_density(v);
        match table.eval(&h, u, lit(QUAD_REL)) {
            Some(v) => v,
            None => log_add_exp(table.eval(&h, u0, lit(QUAD_REL)).unwrap(), self.ln_tail_integral(u0, u)),
        }
    }

    /// `ln ∫_{e^{u0}}^{e^{u}} b`, computed in the logarithmic variable.
    fn ln_tail_integral(&self, u0: T, u: T) -> T {
        if u <= u0 {
            return T::neg_infinity();
        }
        let h = |v: T| v + self.ln_density(v);
        let hu = h(u);
        let r = adaptive_graded(|v: T| (h(v) - hu).exp(), u0, u, true, lit(QUAD_REL), T::zero());
        hu + r.value.ln()
    }

    /// Left-continuous generalized inverse `b⁻¹(s) = inf{t > 0 : b(t) ≥ s}`.
    pub fn inverse_density(&self, s: T) -> T {
        if !(s > T::zero()) {
            return T::zero();
        }
        match &self.0.density {
            Density::Power { p } => s.powf(T::one() / (*p - T::one())),
            _ => self.ln_inverse_density(s.ln()).exp(),
        }
    }

    /// `ln b⁻¹(eʸ)`.
    pub fn ln_inverse_density(&self, y: T) -> T {
        if let Density::Power { p } = &self.0.density {
            return y / (*p - T::one());
        }
        let f = |u: T| self.ln_density(u);
        let floor: T = lit(-740.0);
        let cap: T = lit(1e7);
        let mut lo = -T::one();
        let mut hi = T::one();
        let mut step = T::one();
        while f(lo) >= y {
            lo -= step;
            step += step;
            if lo < floor {
                return T::neg_infinity();
            }
        }
        step = T::one();
        while f(hi) < y {
            lo = hi;
            hi += step;
            step += step;
            if hi > cap {
                return T::infinity();
            }
        }
        let tiny = T::epsilon() * lit(2.0);
        for _ in 0..200 {
            let mid = lo + (hi - lo) * lit(0.5);
            if mid <= lo || mid >= hi || hi - lo <= tiny * hi.abs().max(T::one()) {
                break;
            }
            if f(mid) >= y {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Cached node table over the evaluation grid, built on first use.
    pub fn grid(&self) -> &Grid<T> {
        self.0.grid.get_or_init(|| self.build_grid())
    }

    fn build_grid(&self) -> Grid<T> {
        let gs = self.0.grid_spec;
        let (u0, u1) = (gs.t_min.ln(), gs.t_max.ln());
        let decades = (gs.t_max / gs.t_min).log10().to_f64_lossy();
        let n = (decades * gs.per_decade as f64).round().max(1.0) as usize;
        let du = (u1 - u0) / T::from_usize(n).unwrap();
        let t: Vec<T> = (0..=n).map(|j| (u0 + du * T::from_usize(j).unwrap()).exp()).collect();
        let b: Vec<T> = t.iter().map(|&x| self.density(x)).collect();
        let big_b = match &self.0.density {
            Density::Inverse(_) | Density::Tabulated { .. } => t.iter().map(|&x| self.value(x)).collect(),
            _ => {
                let mut acc = self.integrate(T::zero(), t[0]);
                let mut out = Vec::with_capacity(t.len());
                out.push(acc);
                for w in t.windows(2) {
                    acc += self.integrate(w[0], w[1]);
                    out.push(acc);
                }
                out
            }
        };
        Grid { t, b, big_b }
    }

    fn integrate(&self, a: T, b: T) -> T {
        if let Density::Head { knot, .. } = &self.0.density {
            if a < *knot && *knot < b {
                return self.integrate(a, *knot) + self.integrate(*knot, b);
            }
        }
        if let Density::Piecewise { knots, .. } = &self.0.density {
            if let Some(&k) = knots.iter().find(|&&k| a < k && k < b) {
                return self.integrate(a, k) + self.integrate(k, b);
            }
        }
        adaptive(|x| self.density(x), a, b, lit(QUAD_REL), T::zero()).value
    }

    fn value_from_grid(&self, t: T) -> T {
        let g = self.grid();
        let last = g.t.len() - 1;
        if t <= g.t[0] {
            return self.integrate(T::zero(), t);
        }
        if t >= g.t[last] {
            return self.ln_beyond_grid(t.ln()).exp();
        }
        let j = g.t.partition_point(|x| *x <= t) - 1;
        g.big_b[j] + self.integrate(g.t[j], t)
    }
}

/// `ln` of `B(t_k) + b(t_k)·t_k/(e+1)·((t/t_k)^{e+1} − 1)` at `t = eᵘ`.
fn closed_tail_ln<T: Real>(tk: T, bk: T, big_bk: T, e: T, u: T) -> T {
    let e1 = e + T::one();
    let a = bk * tk / e1;
    let grow = e1 * (u - tk.ln());
    a.ln() + grow + ((big_bk - a) / a * (-grow).exp()).ln_1p()
}

fn tab_density<T: Real>(u0: T, du: T, b: &[T], j: usize, t: T) -> T {
    let tj = (u0 + du * T::from_usize(j).unwrap()).exp();
    let (bj, bk) = (b[j], b[j + 1]);
    if bj > T::zero() && bk > T::zero() {
        let e = (bk / bj).ln() / du;
        bj * (t / tj).powf(e)
    } else {
        let tk = (u0 + du * T::from_usize(j + 1).unwrap()).exp();
        bj + (bk - bj) * (t - tj) / (tk - tj)
    }
}

fn tab_cell_integral<T: Real>(u0: T, du: T, b: &[T], j: usize, t: T) -> T {
    let tj = (u0 + du * T::from_usize(j).unwrap()).exp();
    let (bj, bk) = (b[j], b[j + 1]);
    if bj > T::zero() && bk > T::zero() {
        let e1 = (bk / bj).ln() / du + T::one();
        bj * tj / e1 * ((t / tj).powf(e1) - T::one())
    } else {
        let tk = (u0 + du * T::from_usize(j + 1).unwrap()).exp();
        let slope = (bk - bj) / (tk - tj);
        let d = t - tj;
        bj * d + slope * d * d * lit(0.5)
    }
}

fn tab_value<T: Real>(u0: T, du: T, b: &[T], cum: &[T], lo: T, hi: T, t: T) -> T {
    let last = b.len() - 1;
    let t0 = u0.exp();
    let tl = (u0 + du * T::from_usize(last).unwrap()).exp();
    if t <= t0 {
        return b[0] * t0 / (lo + T::one()) * (t / t0).powf(lo + T::one());
    }
    if t >= tl {
        return cum[last] + b[last] * tl / (hi + T::one()) * ((t / tl).powf(hi + T::one()) - T::one());
    }
    let x = (t.ln() - u0) / du;
    let j = x.floor().to_usize().unwrap_or(0).min(last - 1);
    cum[j] + tab_cell_integral(u0, du, b, j, t)
}

fn positive_finite<T: Real>(x: T, what: &str) -> Result<(), OrliczError> {
    if x.is_finite() && x > T::zero() {
        Ok(())
    } else {
        Err(OrliczError::InvalidParameter(format!("{what} must be positive and finite, got {x}")))
    }
}

/// Builds a Young function on the default grid.
pub fn make_young<T: Real>(spec: &DensitySpec<T>) -> Result<YoungFunction<T>, OrliczError> {
    make_young_on(spec, GridSpec::default())
}

/// Builds a Young function with an explicit evaluation grid.
pub fn make_young_on<T: Real>(spec: &DensitySpec<T>, grid: GridSpec<T>) -> Result<YoungFunction<T>, OrliczError> {
    positive_finite(grid.t_min, "grid t_min")?;
    if !(grid.t_max > grid.t_min) || grid.per_decade == 0 {
        return Err(OrliczError::InvalidParameter("grid must satisfy 0 < t_min < t_max".into()));
    }
    let zero = T::zero();
    let one = T::one();
    match spec {
        DensitySpec::PowerLaw { p } => {
            if !(p.is_finite() && *p > one) {
                return Err(OrliczError::InvalidParameter(format!("power law needs p > 1, got {p}")));
            }
            Ok(YoungFunction::wrap(
                Density::Power { p: *p },
                Tails { lower: *p, upper: *p, upper_log: zero },
                grid,
            ))
        }
        DensitySpec::PowerLog { p, beta } => {
            if !(p.is_finite() && *p > one && beta.is_finite()) {
                return Err(OrliczError::InvalidParameter(format!("power-log needs p > 1, got p = {p}")));
            }
            let raw = YoungFunction::wrap(
                Density::PowerLog { p: *p, beta: *beta },
                Tails { lower: *p, upper: *p, upper_log: *beta },
                grid,
            );
            match convexification_knot(&raw, *p, *beta) {
                None => Ok(raw),
                Some(knot) => {
                    let slope = raw.value(knot) / knot;
                    Ok(YoungFunction::wrap(
                        Density::Head { knot, slope, inner: raw },
                        Tails { lower: one, upper: *p, upper_log: *beta },
                        grid,
                    ))
                }
            }
        }
        DensitySpec::PiecewiseDensity { breakpoints, exponents } => {
            if exponents.len() != breakpoints.len() + 1 {
                return Err(OrliczError::InvalidParameter(
                    "piecewise density needs one more exponent than breakpoints".into(),
                ));
            }
            for (i, &k) in breakpoints.iter().enumerate() {
                positive_finite(k, "breakpoint")?;
                if i > 0 && k <= breakpoints[i - 1] {
                    return Err(OrliczError::InvalidParameter("breakpoints must increase".into()));
                }
            }
            if let Some((i, _)) = exponents.iter().enumerate().find(|(_, e)| !(e.is_finite() && **e >= zero)) {
                let at = if i == 0 { 0.0 } else { breakpoints[i - 1].to_f64_lossy() };
                return Err(OrliczError::NonMonotoneDensity { at });
            }
            let mut b_at = Vec::with_capacity(breakpoints.len());
            let mut big_b_at = Vec::with_capacity(breakpoints.len());
            for (i, &k) in breakpoints.iter().enumerate() {
                if i == 0 {
                    b_at.push(k.powf(exponents[0]));
                    big_b_at.push(k.powf(exponents[0] + one) / (exponents[0] + one));
                } else {
                    let (kp, e) = (breakpoints[i - 1], exponents[i]);
                    b_at.push(b_at[i - 1] * (k / kp).powf(e));
                    big_b_at.push(big_b_at[i - 1] + b_at[i - 1] * kp / (e + one) * ((k / kp).powf(e + one) - one));
                }
            }
            let tails = Tails {
                lower: exponents[0] + one,
                upper: *exponents.last().unwrap() + one,
                upper_log: zero,
            };
            Ok(YoungFunction::wrap(
                Density::Piecewise { knots: breakpoints.clone(), exps: exponents.clone(), b_at, big_b_at },
                tails,
                grid,
            ))
        }
        DensitySpec::PowerSum { terms } => {
            for &(c, e) in terms {
                if !(c.is_finite() && c >= zero && e.is_finite()) {
                    return Err(OrliczError::InvalidParameter(format!("bad power-sum term ({c}, {e})")));
                }
                if c > zero && e < zero {
                    return Err(OrliczError::NonMonotoneDensity { at: 0.0 });
                }
            }
            let live: Vec<(T, T)> = terms.iter().copied().filter(|(c, _)| *c > zero).collect();
            if live.is_empty() {
                return Err(OrliczError::DegenerateDensity);
            }
            let lo = live.iter().map(|t| t.1).fold(T::infinity(), T::min);
            let hi = live.iter().map(|t| t.1).fold(T::neg_infinity(), T::max);
            Ok(YoungFunction::wrap(
                Density::PowerSum { terms: live },
                Tails { lower: lo + one, upper: hi + one, upper_log: zero },
                grid,
            ))
        }
        DensitySpec::Tabulated { t_min, t_max, values, lo_exponent, hi_exponent } => {
            positive_finite(*t_min, "t_min")?;
            if !(*t_max > *t_min) || values.len() < 2 {
                return Err(OrliczError::InvalidParameter("tabulation needs t_min < t_max and two values".into()));
            }
            if !(lo_exponent.is_finite() && *lo_exponent >= zero && hi_exponent.is_finite() && *hi_exponent >= zero) {
                return Err(OrliczError::InvalidParameter("tail exponents must be finite and non-negative".into()));
            }
            if values.iter().any(|v| !(v.is_finite() && *v >= zero)) {
                return Err(OrliczError::InvalidParameter("tabulated values must be finite and non-negative".into()));
            }
            let u0 = t_min.ln();
            let du = (t_max.ln() - u0) / T::from_usize(values.len() - 1).unwrap();
            if let Some(j) = values.windows(2).position(|w| w[1] < w[0]) {
                let at = (u0 + du * T::from_usize(j + 1).unwrap()).exp().to_f64_lossy();
                return Err(OrliczError::NonMonotoneDensity { at });
            }
            if values.iter().all(|v| *v == zero) {
                return Err(OrliczError::DegenerateDensity);
            }
            let mut cum = Vec::with_capacity(values.len());
            let t0 = u0.exp();
            cum.push(values[0] * t0 / (*lo_exponent + one));
            for j in 0..values.len() - 1 {
                let tk = (u0 + du * T::from_usize(j + 1).unwrap()).exp();
                cum.push(cum[j] + tab_cell_integral(u0, du, values, j, tk));
            }
            let lower = if values[0] > zero { *lo_exponent + one } else { T::infinity() };
            Ok(YoungFunction::wrap(
                Density::Tabulated { u0, du, b: values.clone(), cum, lo: *lo_exponent, hi: *hi_exponent },
                Tails { lower, upper: *hi_exponent + one, upper_log: zero },
                grid,
            ))
        }
    }
}

/// Smallest knot beyond which the power-log density is non-decreasing and
/// dominates `B(t)/t`; `None` when the density is already monotone.
fn convexification_knot<T: Real>(raw: &YoungFunction<T>, p: T, beta: T) -> Option<T> {
    if beta >= T::zero() {
        return None;
    }
    let slope = |t: T| {
        let l = ln_e_plus_exp(t.ln());
        p - T::one() + beta * t / ((T::E() + t) * l)
    };
    let mut t: T = lit(1e-6);
    let step: T = lit(1.01);
    let mut last_bad = None;
    while t < lit(1e12) {
        if slope(t) < T::zero() {
            last_bad = Some(t);
        }
        t *= step;
    }
    let mut t = last_bad? * step;
    while raw.density(t) * t < raw.value(t) {
        t *= step;
    }
    Some(t)
}

/// Young conjugate `B̃(s) = ∫₀ˢ b⁻¹`, evaluated through Young's equality.
pub fn conjugate<T: Real>(b: &YoungFunction<T>) -> YoungFunction<T> {
    let t = b.tails();
    let dual = |e: T| {
        if e.is_infinite() {
            T::one()
        } else if e <= T::one() {
            T::infinity()
        } else {
            e / (e - T::one())
        }
    };
    let upper_log = if t.upper > T::one() && t.upper.is_finite() {
        -t.upper_log / (t.upper - T::one())
    } else {
        T::zero()
    };
    YoungFunction::wrap(
        Density::Inverse(b.clone()),
        Tails { lower: dual(t.lower), upper: dual(t.upper), upper_log },
        b.grid_spec(),
    )
}

/// The Young function equal to `t·B(1)` on `[0, 1]` and to `B` beyond.
pub fn near_zero_modification<T: Real>(b: &YoungFunction<T>) -> YoungFunction<T> {
    let slope = b.value(T::one());
    let t = b.tails();
    YoungFunction::wrap(
        Density::Head { knot: T::one(), slope, inner: b.clone() },
        Tails { lower: T::one(), upper: t.upper, upper_log: t.upper_log },
        b.grid_spec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> GridSpec<f64> {
        GridSpec { t_min: 1e-4, t_max: 1e4, per_decade: 64 }
    }

    #[test]
    fn density_slopes_match_differences() {
        let specs: Vec<DensitySpec<f64>> = vec![
            DensitySpec::PowerLaw { p: 1.5 },
            DensitySpec::PowerLaw { p: 4.0 },
            DensitySpec::PowerLog { p: 2.5, beta: 1.0 },
            DensitySpec::PowerLog { p: 2.0, beta: -0.5 },
            DensitySpec::PowerSum { terms: vec![(2.0, 1.0), (4.0, 3.0)] },
            DensitySpec::PiecewiseDensity { breakpoints: vec![1.0], exponents: vec![1.0, 2.0] },
        ];
        for spec in &specs {
            let b = make_young(spec).unwrap();
            for t in [0.013, 0.4, 2.7, 55.0] {
                let h = 1e-6 * t;
                let fd = (b.density(t + h) - b.density(t - h)) / (2.0 * h);
                let an = b.density_slope(t);
                assert!((fd - an).abs() <= 1e-5 * an.abs().max(1e-12), "{spec:?} at {t}: {fd} vs {an}");
            }
        }
        let c = conjugate(&make_young(&DensitySpec::PowerLaw { p: 3.0 }).unwrap());
        assert!((c.density_slope(4.0) - 0.5 * 4f64.powf(-0.5)).abs() < 1e-6);
    }

    #[test]
    fn quadratic() {
        let b = make_young(&DensitySpec::PowerLaw { p: 2.0 }).unwrap();
        for t in [1e-3f64, 0.5, 1.0, 7.0] {
            assert!((b.value(t) - t * t / 2.0).abs() <= 1e-15 * t * t);
            assert_eq!(b.density(t), t);
        }
        assert_eq!(b.value(0.0), 0.0);
    }

    #[test]
    fn power_sum_matches_closed_antiderivative() {
        let b = make_young(&DensitySpec::PowerSum { terms: vec![(2.0f64, 1.0), (4.0, 3.0)] }).unwrap();
        let g = b.grid();
        let step = g.t.len() / 1000;
        let mut worst: f64 = 0.0;
        for j in (0..g.t.len()).step_by(step.max(1)) {
            let t = g.t[j];
            let exact = t * t + t.powi(4);
            worst = worst.max((g.big_b[j] - exact).abs() / exact);
        }
        assert!(worst <= 1e-8, "worst relative error {worst:e}");
        assert!(g.is_convex(1e-9));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            make_young(&DensitySpec::PowerLaw { p: 1.0 }),
            Err(OrliczError::InvalidParameter(_))
        ));
        let dec = DensitySpec::Tabulated {
            t_min: 1e-2,
            t_max: 1e2,
            values: vec![1.0, 2.0, 1.5, 3.0],
            lo_exponent: 1.0,
            hi_exponent: 1.0,
        };
        assert!(matches!(make_young(&dec), Err(OrliczError::NonMonotoneDensity { .. })));
        let zero = DensitySpec::Tabulated {
            t_min: 1e-2,
            t_max: 1e2,
            values: vec![0.0; 5],
            lo_exponent: 1.0,
            hi_exponent: 1.0,
        };
        assert_eq!(make_young(&zero).unwrap_err(), OrliczError::DegenerateDensity);
        assert_eq!(
            make_young(&DensitySpec::PowerSum { terms: vec![(0.0f64, 1.0)] }).unwrap_err(),
            OrliczError::DegenerateDensity
        );
    }

    #[test]
    fn tabulated_power_is_exact() {
        let n: usize = 81;
        let values: Vec<f64> = (0..n).map(|j| (10f64.powf(-2.0 + 4.0 * j as f64 / (n - 1) as f64)).powi(2)).collect();
        let b = make_young_on(
            &DensitySpec::Tabulated { t_min: 1e-2, t_max: 1e2, values, lo_exponent: 2.0, hi_exponent: 2.0 },
            coarse(),
        )
        .unwrap();
        for t in [1e-3f64, 0.37, 5.0, 300.0] {
            let exact = t * t * t / 3.0;
            assert!((b.value(t) - exact).abs() <= 1e-10 * exact, "t = {t}");
        }
    }

    #[test]
    fn piecewise_with_flat_segment() {
        let b = make_young(&DensitySpec::PiecewiseDensity { breakpoints: vec![1.0f64, 2.0], exponents: vec![1.0, 0.0, 2.0] })
            .unwrap();
        assert!((b.density(1.5) - 1.0).abs() < 1e-15);
        assert!((b.value(2.0) - 1.5).abs() < 1e-14);
        assert!((b.inverse_density(1.0) - 1.0).abs() < 1e-12);
        assert!((b.inverse_density(1.0 + 1e-9) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn log_domain_agrees() {
        let b = make_young(&DensitySpec::PowerLog { p: 2.5, beta: 1.0 }).unwrap();
        for u in [-3.0f64, 0.0, 5.0, 30.0] {
            assert!((b.ln_value(u) - b.value(f64::exp(u)).ln()).abs() < 1e-10);
            assert!((b.ln_density(u) - b.density(f64::exp(u)).ln()).abs() < 1e-12);
        }
        let far = b.ln_value(2000.0);
        let approx = 2.5 * 2000.0 + 2000f64.ln() - 2.5f64.ln();
        assert!((far - approx).abs() < 1e-2, "{far} vs {approx}");
    }

    #[test]
    fn negative_log_exponent_is_convexified() {
        let b = make_young(&DensitySpec::PowerLog { p: 1.2, beta: -3.0 }).unwrap();
        let g = b.grid();
        assert!(g.b.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
        assert!(g.is_convex(1e-9));
    }

    #[test]
    fn single_precision_power() {
        let b = make_young_on(&DensitySpec::PowerLaw { p: 2.0f32 }, GridSpec { t_min: 1e-3, t_max: 1e3, per_decade: 16 })
            .unwrap();
        assert!((b.value(3.0) - 4.5).abs() < 1e-5);
        let c = conjugate(&b);
        assert!((c.value(3.0) - 4.5).abs() < 1e-4);
    }
}
