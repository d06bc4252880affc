//! Deliberately corrupted inputs. Each check must fail on its control.

use numeric::{lit, Real};
use rearrange::DiscreteField;
use solver::{ApproximationRun, GradientField};

/// Multiplies every `u_k` by `factor` after the solve (truncation-energy control).
pub fn scale_solutions<T: Real>(run: &ApproximationRun<T>, factor: T) -> ApproximationRun<T> {
    let mut out = run.clone();
    for s in &mut out.steps {
        s.solution.u.iter_mut().for_each(|v| *v = *v * factor);
        s.solution.gradient = GradientField::of(&out.problem.mesh, &s.solution.u);
    }
    out
}

/// Multiplies the gradients, leaving `u` unchanged (band-energy control).
pub fn inflate_gradients<T: Real>(run: &ApproximationRun<T>, factor: T) -> ApproximationRun<T> {
    let mut out = run.clone();
    for s in &mut out.steps {
        s.solution.gradient.vectors.iter_mut().for_each(|g| *g = [g[0] * factor, g[1] * factor]);
    }
    out
}

/// Records `‖f_k‖₁` with a spurious factor `(k₀/k)⁴` (gradient-budget control).
pub fn misscale_datum_norms<T: Real>(run: &ApproximationRun<T>) -> ApproximationRun<T> {
    let mut out = run.clone();
    let k0 = out.steps.first().map_or(1, |s| s.k);
    for s in &mut out.steps {
        s.datum_l1 = s.datum_l1 * (T::from_usize(k0).unwrap() / T::from_usize(s.k).unwrap()).powi(4);
    }
    out
}

/// Multiplies every other `u_k` by `factor`, so the sequence oscillates
/// between two limits (Cauchy-in-measure control).
pub fn alternate_scaling<T: Real>(run: &ApproximationRun<T>, factor: T) -> ApproximationRun<T> {
    let mut out = run.clone();
    for s in out.steps.iter_mut().skip(1).step_by(2) {
        s.solution.u.iter_mut().for_each(|v| *v = *v * factor);
        s.solution.gradient = GradientField::of(&out.problem.mesh, &s.solution.u);
    }
    out
}

/// Scales the coarsest solution by `factor` (monotonicity-trick control).
pub fn scale_first_solution<T: Real>(run: &ApproximationRun<T>, factor: T) -> ApproximationRun<T> {
    let mut out = run.clone();
    if let Some(s) = out.steps.first_mut() {
        s.solution.u.iter_mut().for_each(|v| *v = *v * factor);
        s.solution.gradient = GradientField::of(&out.problem.mesh, &s.solution.u);
    }
    out
}

/// Raises the largest cell of `u` to `height·max|u|` (level-decay control).
pub fn spike<T: Real>(u: &DiscreteField<T>, height: T) -> DiscreteField<T> {
    let top = u.max_abs();
    let j = u.values().iter().position(|v| v.abs() == top).unwrap_or(0);
    let mut vals = u.values().to_vec();
    vals[j] = top * height.max(lit(1.0));
    DiscreteField::new(vals, u.measures().to_vec()).expect("measures unchanged")
}
