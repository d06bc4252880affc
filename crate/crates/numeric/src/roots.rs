use crate::scalar::{lit, Real};

/// Expands `[lo, hi]` geometrically upward until `f(hi) ≥ target`.
///
/// Returns `None` when `f` never reaches `target` within `max_doublings`.
pub fn bracket_increasing<T: Real, F: FnMut(T) -> T>(
    f: &mut F,
    target: T,
    mut lo: T,
    mut hi: T,
    max_doublings: usize,
) -> Option<(T, T)> {
    for _ in 0..max_doublings {
        if f(hi) >= target {
            return Some((lo, hi));
        }
        lo = hi;
        hi = hi + (hi - lo).max(hi.abs()).max(T::one());
    }
    None
}

/// Leftmost `x ∈ [lo, hi]` with `f(x) ≥ target` for non-decreasing `f`.
///
/// Plain bisection, so flat stretches of `f` resolve to their left end.
pub fn bisect_increasing<T: Real, F: FnMut(T) -> T>(mut f: F, target: T, mut lo: T, mut hi: T) -> T {
    let tiny = T::epsilon() * lit(4.0);
    for _ in 0..200 {
        let mid = lo + (hi - lo) * lit(0.5);
        if mid <= lo || mid >= hi || (hi - lo) <= tiny * (lo.abs() + hi.abs()) {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root() {
        let x = bisect_increasing(|x: f64| x * x * x, 27.0, 0.0, 10.0);
        assert!((x - 3.0).abs() < 1e-13);
    }

    #[test]
    fn flat_segment_resolves_left() {
        let f = |x: f64| if x < 1.0 { x } else if x < 2.0 { 1.0 } else { x - 1.0 };
        let x = bisect_increasing(f, 1.0, 0.0, 5.0);
        assert!((x - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bracket_grows() {
        let mut f = |x: f64| x.ln();
        let (lo, hi) = bracket_increasing(&mut f, 10.0, 0.5, 1.0, 200).unwrap();
        assert!(f(lo) < 10.0 && f(hi) >= 10.0);
    }
}
