use crate::scalar::{lit, Real};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Integral estimate with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

/// Single 15-point Gauss–Kronrod panel on `[a, b]`; returns `(kronrod, |kronrod − gauss|)`.
pub fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let fc = f(mid);
    let mut rk = fc * lit(WGK[7]);
    let mut rg = fc * lit(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        rk += s * lit(WGK[j]);
        if j % 2 == 1 {
            rg += s * lit(WG[j / 2]);
        }
    }
    (rk * half, ((rk - rg) * half).abs())
}

/// Globally adaptive Gauss–Kronrod quadrature.
///
/// Bisects the panel with the largest error estimate until the summed error
/// falls below `max(abs_tol, rel_tol·|I|)` or the panel budget is spent.
pub fn adaptive<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
) -> QuadResult<T> {
    if a == b {
        return QuadResult { value: T::zero(), error: T::zero(), evaluations: 0 };
    }
    let max_panels = 4000usize;
    let mut panels: Vec<(T, T, T, T)> = Vec::with_capacity(64);
    let (v, e) = gauss_kronrod(&mut f, a, b);
    panels.push((a, b, v, e));
    let mut evals = 15usize;
    loop {
        let total: T = panels.iter().map(|p| p.2).sum();
        let err: T = panels.iter().map(|p| p.3).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if err <= tol || panels.len() >= max_panels {
            return QuadResult { value: total, error: err, evaluations: evals };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0usize, -T::one()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let pm = (pa + pb) * lit(0.5);
        if pm <= pa || pm >= pb {
            let total: T = panels.iter().map(|p| p.2).sum();
            return QuadResult { value: total, error: err, evaluations: evals };
        }
        let (v1, e1) = gauss_kronrod(&mut f, pa, pm);
        let (v2, e2) = gauss_kronrod(&mut f, pm, pb);
        evals += 30;
        panels.push((pa, pm, v1, e1));
        panels.push((pm, pb, v2, e2));
    }
}

/// Adaptive quadrature on panels whose widths double away from one end.
///
/// Suited to long intervals where the integrand is concentrated near `b`
/// (`toward_b`) or near `a`, which a single initial panel would miss.
pub fn adaptive_graded<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    toward_b: bool,
    rel_tol: T,
    abs_tol: T,
) -> QuadResult<T> {
    let mut out = QuadResult { value: T::zero(), error: T::zero(), evaluations: 0 };
    if !(b > a) {
        return out;
    }
    let mut width = T::one();
    let mut done = T::zero();
    let len = b - a;
    while done < len {
        let w = width.min(len - done);
        let (lo, hi) = if toward_b { (b - done - w, b - done) } else { (a + done, a + done + w) };
        let r = adaptive(&mut f, lo, hi, rel_tol, abs_tol);
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
        done += w;
        width += width;
    }
    out
}

/// Integral over `[a, ∞)` through the map `x = a + w/(1 − w)`.
pub fn adaptive_to_infinity<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    rel_tol: T,
    abs_tol: T,
) -> QuadResult<T> {
    let one = T::one();
    adaptive(
        move |w: T| {
            let d = one - w;
            if d <= T::zero() {
                return T::zero();
            }
            let x = a + w / d;
            let v = f(x) / (d * d);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        },
        T::zero(),
        one,
        rel_tol,
        abs_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let (v, _) = gauss_kronrod(&mut |x: f64| x.powi(7) - 3.0 * x * x, 0.0, 2.0);
        assert!((v - (32.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 0.0);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn infinite_range() {
        let r = adaptive_to_infinity(|x: f64| (-x).exp(), 0.0, 1e-12, 0.0);
        assert!((r.value - 1.0).abs() < 1e-11);
        let r = adaptive_to_infinity(|x: f64| x.powf(-2.5), 1.0, 1e-10, 0.0);
        assert!((r.value - 1.0 / 1.5).abs() < 1e-9);
    }

    #[test]
    fn single_precision() {
        let r = adaptive(|x: f32| x.cos(), 0.0, 1.0, 1e-6, 0.0);
        assert!((r.value - 1f32.sin()).abs() < 1e-6);
    }
}
