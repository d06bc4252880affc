use numeric::{lit, Real};
use solver::{Mesh, ProblemSpec};

pub(crate) fn f64_of<T: Real>(x: T) -> f64 {
    x.to_f64_lossy()
}

/// Powers of two from `top·2⁻²⁴` up to the first one above `top`.
pub(crate) fn dyadic_ladder<T: Real>(top: T) -> Vec<T> {
    if !(top > T::zero()) || !top.is_finite() {
        return Vec::new();
    }
    let hi = top.log2().ceil().to_i32().unwrap_or(0);
    ((hi - 24)..=hi).map(|j| lit::<T>(2.0).powi(j)).collect()
}

pub(crate) fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

pub(crate) fn largest_cell<T: Real>(mesh: &Mesh<T>) -> T {
    mesh.measures().iter().fold(T::zero(), |m, x| m.max(*x))
}

/// `a(x_e)` at each element barycenter.
pub(crate) fn element_weights<T: Real>(problem: &ProblemSpec<T>) -> Vec<T> {
    let mesh = &*problem.mesh;
    (0..mesh.element_count()).map(|e| problem.operator.weight().at(mesh.barycenter(e))).collect()
}

/// Whether every vertex value of element `e` satisfies `pred`.
pub(crate) fn all_vertices<T: Real>(mesh: &Mesh<T>, e: usize, u: &[T], pred: impl Fn(T) -> bool) -> bool {
    mesh.vertices(e).iter().all(|&i| pred(u[i]))
}

pub(crate) fn any_vertex<T: Real>(mesh: &Mesh<T>, e: usize, u: &[T], pred: impl Fn(T) -> bool) -> bool {
    mesh.vertices(e).iter().any(|&i| pred(u[i]))
}

pub(crate) fn median_of<T: Real>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) * lit(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_covers_top() {
        let l = dyadic_ladder(3.0f64);
        assert_eq!(*l.last().unwrap(), 4.0);
        assert_eq!(l.len(), 25);
        assert!(dyadic_ladder(0.0f64).is_empty());
    }

    #[test]
    fn medians() {
        assert_eq!(median_of(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median_of(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
