use numeric::{ls_slope, Real};
use solver::ApproximationRun;

use crate::discrete::{f64_of, median_of};
use crate::report::CheckReport;

pub const SUP_OVER_MEDIAN: f64 = 10.0;

/// `C_k = ∫ b(|∇u_k|) / (|Ω|^{1/n}‖f_k‖₁)`; passes when `sup C_k ≤ 10·median C_k`.
///
/// The least-squares slope of `ln C_k` against `ln k` is reported as `growth_slope`.
pub fn check_gradient_budget<T: Real>(run: &ApproximationRun<T>) -> CheckReport {
    let mut rep = CheckReport::new("gradient_budget", &["k", "grad_integral", "datum_l1", "C_k"]);
    rep.tolerance("sup_over_median", SUP_OVER_MEDIAN);
    let mesh = &*run.problem.mesh;
    let n = mesh.dimension() as f64;
    let scale = f64_of(mesh.total_measure()).powf(1.0 / n);
    let mut cs = Vec::new();
    for s in &run.steps {
        let c = f64_of(s.gradient_integral) / (scale * f64_of(s.datum_l1));
        cs.push(c);
        rep.row(vec![s.k as f64, f64_of(s.gradient_integral), f64_of(s.datum_l1), c], c.is_finite());
    }
    if cs.is_empty() {
        rep.require(false, "run has no completed steps");
        return rep;
    }
    let sup = cs.iter().cloned().fold(0.0, f64::max);
    let med = median_of(cs.clone());
    rep.constant("sup_C", sup);
    rep.constant("median_C", med);
    let lk: Vec<f64> = run.steps.iter().map(|s| (s.k as f64).ln()).collect();
    let lc: Vec<f64> = cs.iter().map(|c| c.ln()).collect();
    if let Some(fit) = ls_slope(&lk, &lc) {
        rep.constant("growth_slope", fit.slope);
    }
    rep.require(sup <= SUP_OVER_MEDIAN * med, format!("sup C_k = {sup:e} exceeds {SUP_OVER_MEDIAN}·median = {:e}", SUP_OVER_MEDIAN * med));
    rep
}
