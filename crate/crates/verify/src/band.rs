use numeric::{lit, Real};
use solver::{ApproximationRun, ProblemSpec, Solution};

use crate::discrete::{all_vertices, any_vertex, dyadic_ladder, element_weights, f64_of, max_abs};
use crate::report::CheckReport;
use crate::truncation::REL_SLACK;

/// `∫_{t<|u|<t+τ} a·B(|∇u|)` over elements whose nodal values all lie in the
/// band with one sign.
pub fn band_energy<T: Real>(problem: &ProblemSpec<T>, sol: &Solution<T>, t: T, tau: T) -> T {
    let mesh = &*problem.mesh;
    let b = problem.operator.young();
    let a = element_weights(problem);
    let g = sol.gradient.magnitudes();
    (0..mesh.element_count())
        .filter(|&e| {
            all_vertices(mesh, e, &sol.u, |v| v > t && v < t + tau)
                || all_vertices(mesh, e, &sol.u, |v| -v > t && -v < t + tau)
        })
        .map(|e| a[e] * b.value(g[e]) * mesh.measures()[e])
        .sum()
}

/// `∫|f|` over elements with at least one nodal value above `t` in modulus,
/// which contains `{|u| > t}` for P1 functions.
pub fn datum_above<T: Real>(problem: &ProblemSpec<T>, sol: &Solution<T>, f: &[T], t: T) -> T {
    let mesh = &*problem.mesh;
    (0..mesh.element_count())
        .filter(|&e| any_vertex(mesh, e, &sol.u, |v| v.abs() > t))
        .map(|e| f[e].abs() * mesh.measures()[e])
        .sum()
}

/// `∫_{t<|u_k|<t+τ} B(|∇u_k|) ≤ τ·∫_{|u_k|>t}|f_k|` for dyadic `t` and
/// `τ ∈ {t/2, t, 1/2}`.
pub fn check_band_energy<T: Real>(run: &ApproximationRun<T>) -> CheckReport {
    let mut rep = CheckReport::new("band_energy", &["k", "t", "tau", "lhs", "rhs"]);
    rep.tolerance("relative_slack", REL_SLACK);
    let mut worst = 0.0f64;
    for step in &run.steps {
        let f = step.datum.values();
        for t in dyadic_ladder(max_abs(&step.solution.u)) {
            let above = datum_above(&run.problem, &step.solution, f, t);
            for tau in [t * lit(0.5), t, lit(0.5)] {
                let lhs = band_energy(&run.problem, &step.solution, t, tau);
                let rhs = tau * above;
                if rhs > T::zero() {
                    worst = worst.max(f64_of(lhs / rhs));
                }
                let ok = lhs <= rhs * (T::one() + lit(REL_SLACK));
                rep.row(vec![step.k as f64, f64_of(t), f64_of(tau), f64_of(lhs), f64_of(rhs)], ok);
            }
        }
    }
    rep.require(!run.steps.is_empty(), "run has no completed steps");
    rep.constant("max_ratio", worst);
    rep
}
