use numeric::{lit, Real};
use rearrange::truncate_value;
use solver::ApproximationRun;

use crate::discrete::{element_weights, f64_of};
use crate::report::CheckReport;
use crate::truncation::REL_SLACK;

/// `∫ (𝒜(∇u_k) − 𝒜(∇u_m))·∇T_δ(u_k − u_m) ≤ 2δ(‖f_k‖₁ + ‖f_m‖₁)` for every
/// pair of steps, with `T_δ` applied at the nodes.
pub fn check_monotonicity_trick<T: Real>(run: &ApproximationRun<T>, delta: T) -> CheckReport {
    let mut rep = CheckReport::new("monotonicity_trick", &["k", "m", "lhs", "rhs"]);
    rep.tolerance("relative_slack", REL_SLACK);
    rep.constant("delta", f64_of(delta));
    let problem = &run.problem;
    let mesh = &*problem.mesh;
    let b = problem.operator.young();
    let a = element_weights(problem);
    let flux = |g: [T; 2]| {
        let t = g[0].hypot(g[1]);
        if t > T::zero() {
            let s = b.density(t) / t;
            [g[0] * s, g[1] * s]
        } else {
            [T::zero(); 2]
        }
    };
    let mut worst = 0.0f64;
    for (i, sk) in run.steps.iter().enumerate() {
        for sm in &run.steps[i + 1..] {
            let w: Vec<T> = sk.solution.u.iter().zip(&sm.solution.u).map(|(x, y)| truncate_value(*x - *y, delta)).collect();
            let mut lhs = T::zero();
            for e in 0..mesh.element_count() {
                let (fk, fm) = (flux(sk.solution.gradient.vectors[e]), flux(sm.solution.gradient.vectors[e]));
                let gr = mesh.shape_gradients(e);
                let mut gw = [T::zero(); 2];
                for (l, &v) in mesh.vertices(e).iter().enumerate() {
                    gw[0] += w[v] * gr[l][0];
                    gw[1] += w[v] * gr[l][1];
                }
                lhs += a[e] * ((fk[0] - fm[0]) * gw[0] + (fk[1] - fm[1]) * gw[1]) * mesh.measures()[e];
            }
            let rhs = lit::<T>(2.0) * delta * (sk.datum_l1 + sm.datum_l1);
            worst = worst.max(f64_of(lhs / rhs));
            rep.row(vec![sk.k as f64, sm.k as f64, f64_of(lhs), f64_of(rhs)], lhs <= rhs * (T::one() + lit(REL_SLACK)));
        }
    }
    rep.constant("max_ratio", worst);
    rep
}
