use std::sync::Mutex;

use crate::quad::adaptive;
use crate::scalar::Real;

/// Lazily extended table of `ln(C + ∫_{u₀}^{u} e^{h(v)} dv)` on a uniform grid in `u`.
///
/// The same `h` must be passed on every call; the table caches cell integrals.
#[derive(Debug)]
pub struct LogCumulative<T> {
    u0: T,
    step: T,
    max_cells: usize,
    cum: Mutex<Vec<T>>,
}

fn log_add<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln ∫_a^b e^{h}` with the integrand rescaled by its larger endpoint value.
pub fn ln_integral_exp<T: Real, F: Fn(T) -> T>(h: &F, a: T, b: T, rel: T) -> T {
    if b <= a {
        return T::neg_infinity();
    }
    let href = h(a).max(h(b));
    let r = adaptive(|v| (h(v) - href).exp(), a, b, rel, T::zero()).value;
    href + r.ln()
}

impl<T: Real> LogCumulative<T> {
    pub fn new(u0: T, ln_c: T, step: T, max_cells: usize) -> Self {
        LogCumulative { u0, step, max_cells, cum: Mutex::new(vec![ln_c]) }
    }

    pub fn start(&self) -> T {
        self.u0
    }

    /// Value at `u ≥ u₀`; `None` beyond the table capacity.
    pub fn eval<F: Fn(T) -> T>(&self, h: &F, u: T, rel: T) -> Option<T> {
        let first = self.cum.lock().unwrap()[0];
        if u <= self.u0 {
            return Some(first);
        }
        let k = ((u - self.u0) / self.step).floor().to_usize()?;
        if k > self.max_cells {
            return None;
        }
        let base = {
            let mut cum = self.cum.lock().unwrap();
            while cum.len() <= k {
                let j = cum.len() - 1;
                let a = self.u0 + self.step * T::from_usize(j).unwrap();
                let cell = ln_integral_exp(h, a, a + self.step, rel);
                let next = log_add(cum[j], cell);
                cum.push(next);
            }
            cum[k]
        };
        let a = self.u0 + self.step * T::from_usize(k).unwrap();
        Some(log_add(base, ln_integral_exp(h, a, u, rel)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_closed_power_integral() {
        let h = |v: f64| 3.0 * v;
        let table = LogCumulative::new(0.0, (1.0f64 / 3.0).ln(), 0.25, 100_000);
        for u in [0.1, 1.0, 7.3, 50.0, 400.0, 2000.0] {
            let exact = 3.0 * u - 3f64.ln();
            let got = table.eval(&h, u, 1e-13).unwrap();
            assert!((got - exact).abs() < 1e-12 * exact.abs().max(1.0), "{u}: {got} vs {exact}");
        }
        assert!(table.eval(&h, 1e6, 1e-13).is_none());
    }
}
