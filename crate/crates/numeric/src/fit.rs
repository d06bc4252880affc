use crate::scalar::Real;

/// Ordinary least-squares line `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
}

/// Least-squares slope of `ys` against `xs`; `None` for fewer than two distinct `x`.
pub fn ls_slope<T: Real>(xs: &[T], ys: &[T]) -> Option<LineFit<T>> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nf = T::from_usize(n)?;
    let mx = xs[..n].iter().copied().sum::<T>() / nf;
    let my = ys[..n].iter().copied().sum::<T>() / nf;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for i in 0..n {
        let dx = xs[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }
    if sxx <= T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit { slope, intercept: my - slope * mx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn exact_lines_recovered(a in -5.0f64..5.0, b in -3.0f64..3.0) {
            let xs: Vec<f64> = (0..9).map(|i| i as f64 * 0.7).collect();
            let ys: Vec<f64> = xs.iter().map(|x| a + b * x).collect();
            let fit = ls_slope(&xs, &ys).unwrap();
            prop_assert!((fit.slope - b).abs() < 1e-10);
            prop_assert!((fit.intercept - a).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_input() {
        assert!(ls_slope(&[1.0f64], &[2.0]).is_none());
        assert!(ls_slope(&[1.0f64, 1.0], &[2.0, 3.0]).is_none());
    }
}
