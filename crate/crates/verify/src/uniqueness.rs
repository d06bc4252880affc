use numeric::Real;
use rearrange::{distribution, median, DiscreteField};
use solver::{element_values, ApproximationRun, BoundaryCondition};

use crate::discrete::{f64_of, largest_cell};
use crate::report::CheckReport;

/// Limits of two schedules for the same datum must agree: `|{|u_a − u_b − κ| > tol}|`
/// is at most one cell measure, with `κ = 0` for Dirichlet problems and
/// `κ = med(u_a) − med(u_b)` for Neumann problems.
pub fn check_uniqueness<T: Real>(a: &ApproximationRun<T>, b: &ApproximationRun<T>, tol: T) -> CheckReport {
    let mut rep = CheckReport::new("uniqueness", &[]);
    rep.tolerance("tol", f64_of(tol));
    let (Some(la), Some(lb)) = (a.limit(), b.limit()) else {
        rep.require(false, "a run has no completed steps");
        return rep;
    };
    let mesh = &*a.problem.mesh;
    if mesh.node_count() != b.problem.mesh.node_count() || mesh.element_count() != b.problem.mesh.element_count() {
        rep.require(false, "runs use different meshes");
        return rep;
    }
    let cell = largest_cell(mesh);
    rep.tolerance("cell_measure", f64_of(cell));
    let (ua, ub) = (element_values(mesh, &la.solution.u), element_values(mesh, &lb.solution.u));
    let kappa = match a.problem.bc {
        BoundaryCondition::Dirichlet => T::zero(),
        BoundaryCondition::Neumann => median(&ua) - median(&ub),
    };
    let diff: Vec<T> = ua.values().iter().zip(ub.values()).map(|(x, y)| *x - *y - kappa).collect();
    let field = DiscreteField::new(diff, mesh.measures().to_vec()).expect("mesh measures are positive");
    let exceed = distribution(&field, tol);
    rep.constant("kappa", f64_of(kappa));
    rep.constant("exceedance", f64_of(exceed));
    rep.constant("max_difference", f64_of(field.max_abs()));
    rep.require(exceed <= cell, format!("|{{|u_a − u_b − κ| > tol}}| = {:e} exceeds one cell", f64_of(exceed)));
    rep
}
