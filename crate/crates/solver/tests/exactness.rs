use std::sync::Arc;

use orlicz::{make_young, DensitySpec, Young};
use rearrange::truncate_value;
use solver::*;

fn power(p: f64) -> Young {
    make_young(&DensitySpec::PowerLaw { p }).unwrap()
}

fn dirichlet(mesh: Mesh64, p: f64, datum: Datum<f64>) -> Problem {
    let op = OperatorField::uniform(power(p)).unwrap();
    ProblemSpec::new(Arc::new(mesh), op, BoundaryCondition::Dirichlet, datum).unwrap()
}

fn solve(problem: &Problem, k: usize) -> Solution<f64> {
    let f = mollify_datum(&problem.mesh, &problem.datum, k, problem.bc, problem.mollifier).unwrap();
    solve_weak(problem, &f, &SolveOptions::default(), None).unwrap()
}

#[test]
fn laplacian_reproduces_parabola_at_nodes() {
    let mesh = build_mesh(Geometry::Interval { a: 0.0, b: 1.0 }, 1.0 / 64.0).unwrap();
    let problem = dirichlet(mesh, 2.0, Datum::density(DensityFn::Constant(1.0)));
    let sol = solve(&problem, 1);
    let worst = problem
        .mesh
        .nodes()
        .iter()
        .zip(&sol.u)
        .map(|(x, u)| (u - x[0] * (1.0 - x[0]) / 2.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-12, "{worst:e}");
}

#[test]
fn cubic_growth_matches_flux_integration() {
    let p = 3.0;
    let h = 2f64.powi(-16);
    let mesh = build_mesh(Geometry::Interval { a: -1.0, b: 1.0 }, h).unwrap();
    let problem = dirichlet(mesh, p, Datum::density(DensityFn::Constant(1.0)));
    let sol = solve(&problem, 1);
    let q = p / (p - 1.0);
    let worst = problem
        .mesh
        .nodes()
        .iter()
        .zip(&sol.u)
        .map(|(x, u)| (u - (p - 1.0) / p * (1.0 - x[0].abs().powf(q))).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst:e}");
    let mid = problem.mesh.nodes().iter().position(|x| x[0].abs() < 1e-12).unwrap();
    assert!((sol.u[mid] - 2.0 / 3.0).abs() < 1e-8);
}

#[test]
fn disc_truncations_follow_radial_oracle() {
    for (p, k, h) in [(1.5, 8usize, 1.0 / 64.0), (3.0, 8, 1.0 / 64.0)] {
        let mesh = build_mesh(Geometry::Disc { radius: 1.0 }, h).unwrap();
        let problem = dirichlet(mesh, p, Datum::point_mass([0.0, 0.0], 1.0));
        let sol = solve(&problem, k);
        let oracle = radial_oracle(
            &power(p),
            RadialDatum::Bump { mass: 1.0, k: k as f64, shape: Mollifier::Exponential },
            1.0,
            2,
        )
        .unwrap();
        let t = 0.5 * oracle.center_value();
        let worst = problem
            .mesh
            .nodes()
            .iter()
            .zip(&sol.u)
            .map(|(x, u)| {
                let exact = oracle.value(x[0].hypot(x[1]));
                (truncate_value(*u, t) - truncate_value(exact, t)).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 3.0 * h, "p = {p}: {worst:e}");
    }
}

#[test]
fn constant_datum_on_disc_matches_closed_form() {
    let h = 1.0 / 32.0;
    let mesh = build_mesh(Geometry::Disc { radius: 1.0 }, h).unwrap();
    let problem = dirichlet(mesh, 2.0, Datum::density(DensityFn::Constant(1.0)));
    let sol = solve(&problem, 1);
    let worst = problem
        .mesh
        .nodes()
        .iter()
        .zip(&sol.u)
        .map(|(x, u)| (u - (1.0 - x[0] * x[0] - x[1] * x[1]) / 4.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= h * h, "{worst:e}");
}
