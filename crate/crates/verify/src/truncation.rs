use numeric::{lit, Real};
use solver::{ApproximationRun, ProblemSpec, Solution};

use crate::discrete::{all_vertices, dyadic_ladder, element_weights, f64_of, max_abs};
use crate::report::CheckReport;

pub const REL_SLACK: f64 = 1e-9;

/// `∫_{|u|<t} a·B(|∇u|)` where the set is the union of elements whose nodal
/// values all lie in `(−t, t)`.
pub fn truncated_energy<T: Real>(problem: &ProblemSpec<T>, sol: &Solution<T>, t: T) -> T {
    let mesh = &*problem.mesh;
    let b = problem.operator.young();
    let a = element_weights(problem);
    let g = sol.gradient.magnitudes();
    (0..mesh.element_count())
        .filter(|&e| all_vertices(mesh, e, &sol.u, |v| v.abs() < t))
        .map(|e| a[e] * b.value(g[e]) * mesh.measures()[e])
        .sum()
}

/// `∫_{|u_k|<t} B(|∇u_k|) ≤ 2t‖f_k‖₁` for every step and dyadic level `t`.
///
/// Reports the largest `∫_{|u_k|<t} B(|∇u_k|)/(t‖f_k‖₁)` and `M`, the largest
/// `∫_{|u|<t} B(|∇u|)/t` at the finest scale.
pub fn check_truncation_energy<T: Real>(run: &ApproximationRun<T>) -> CheckReport {
    let mut rep = CheckReport::new("truncation_energy", &["k", "t", "lhs", "rhs", "ratio"]);
    rep.tolerance("relative_slack", REL_SLACK);
    let mut worst = 0.0f64;
    let mut m = 0.0f64;
    let last = run.steps.len().saturating_sub(1);
    for (i, step) in run.steps.iter().enumerate() {
        let norm = step.datum_l1;
        for t in dyadic_ladder(max_abs(&step.solution.u)) {
            let lhs = truncated_energy(&run.problem, &step.solution, t);
            let rhs = lit::<T>(2.0) * t * norm;
            let ratio = f64_of(lhs / (t * norm));
            worst = worst.max(ratio);
            if i == last {
                m = m.max(f64_of(lhs / t));
            }
            let ok = lhs <= rhs * (T::one() + lit(REL_SLACK));
            rep.row(vec![step.k as f64, f64_of(t), f64_of(lhs), f64_of(rhs), ratio], ok);
        }
    }
    rep.require(!run.steps.is_empty(), "run has no completed steps");
    rep.constant("max_ratio", worst);
    rep.constant("M", m);
    rep
}
