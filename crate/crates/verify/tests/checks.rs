use std::sync::{Arc, OnceLock};

use orlicz::{make_young, DensitySpec, Params, Young};
use rearrange::{DiscreteField, Field};
use solver::*;
use verify::controls::*;
use verify::*;

fn power(p: f64) -> Young {
    make_young(&DensitySpec::PowerLaw { p }).unwrap()
}

fn run(geometry: Geometry<f64>, h: f64, p: f64, bc: BoundaryCondition, datum: Datum<f64>, ks: &[usize], shape: Mollifier) -> Run {
    let mesh = Arc::new(build_mesh(geometry, h).unwrap());
    let pr = ProblemSpec::new(mesh, OperatorField::uniform(power(p)).unwrap(), bc, datum).unwrap().with_mollifier(shape);
    let r = run_schedule(&pr, ks, &SolveOptions::default(), None).unwrap();
    assert!(r.is_complete());
    r
}

fn laplace_1d() -> &'static Run {
    static R: OnceLock<Run> = OnceLock::new();
    R.get_or_init(|| {
        run(
            Geometry::Interval { a: 0.0, b: 1.0 },
            1.0 / 64.0,
            2.0,
            BoundaryCondition::Dirichlet,
            Datum::density(DensityFn::Constant(1.0)),
            &[1, 2, 4],
            Mollifier::Exponential,
        )
    })
}

fn dirac(p: f64) -> Run {
    run(
        Geometry::Disc { radius: 1.0 },
        1.0 / 48.0,
        p,
        BoundaryCondition::Dirichlet,
        Datum::point_mass([0.0, 0.0], 1.0),
        &[2, 4, 8, 16],
        Mollifier::Exponential,
    )
}

fn dirac15() -> &'static Run {
    static R: OnceLock<Run> = OnceLock::new();
    R.get_or_init(|| dirac(1.5))
}

fn dirac4() -> &'static Run {
    static R: OnceLock<Run> = OnceLock::new();
    R.get_or_init(|| dirac(4.0))
}

fn limit_field(r: &Run) -> Field {
    element_values(&r.problem.mesh, &r.limit().unwrap().solution.u).map(f64::abs)
}

#[test]
fn truncation_energy_on_parabola_is_below_one() {
    let rep = check_truncation_energy(laplace_1d());
    assert!(rep.passed, "{rep}");
    assert!(rep.get("max_ratio").unwrap() <= 1.0);
}

#[test]
fn truncation_energy_on_dirac_run() {
    let rep = check_truncation_energy(dirac15());
    assert!(rep.passed, "{rep}");
    let bad = check_truncation_energy(&scale_solutions(dirac15(), 10.0));
    assert!(!bad.passed);
    assert!(!check_truncation_energy(&scale_solutions(laplace_1d(), 10.0)).passed);
}

#[test]
fn budget_is_constant_for_exact_data() {
    let rep = check_gradient_budget(laplace_1d());
    assert!(rep.passed);
    let c: Vec<f64> = rep.rows.iter().map(|r| r[3]).collect();
    assert!(c.iter().all(|x| (x - c[0]).abs() <= 1e-6), "{c:?}");
    assert!((c[0] - 0.25).abs() < 1e-3);
}

#[test]
fn budget_on_dirac_run_and_control() {
    let rep = check_gradient_budget(dirac15());
    assert!(rep.passed, "{rep}");
    assert!(rep.get("growth_slope").unwrap() < 0.2);
    assert!(!check_gradient_budget(&misscale_datum_norms(dirac15())).passed);
}

#[test]
fn band_energy_and_control() {
    for r in [laplace_1d(), dirac15()] {
        let rep = check_band_energy(r);
        assert!(rep.passed, "{rep}");
        assert!(!check_band_energy(&inflate_gradients(r, 10.0)).passed);
    }
}

#[test]
fn band_energy_vanishes_beyond_the_maximum() {
    let r = dirac15();
    let s = &r.limit().unwrap().solution;
    let top = s.u.iter().cloned().fold(0.0, f64::max);
    assert_eq!(band_energy(&r.problem, s, 2.0 * top, 0.5), 0.0);
    assert_eq!(datum_above(&r.problem, s, r.limit().unwrap().datum.values(), 2.0 * top), 0.0);
}

#[test]
fn cauchy_in_measure_and_control() {
    let lap = check_cauchy_in_measure(laplace_1d(), &[1e-3, 1e-2]);
    assert!(lap.passed);
    assert_eq!(lap.get("last_pair_measure"), Some(0.0));
    let rep = check_cauchy_in_measure(dirac15(), &[0.02, 0.1]);
    assert!(rep.passed, "{rep}");
    assert!(!check_cauchy_in_measure(&alternate_scaling(dirac15(), 2.0), &[0.02, 0.1]).passed);
}

#[test]
fn monotonicity_trick_and_control() {
    for r in [laplace_1d(), dirac15()] {
        let rep = check_monotonicity_trick(r, 0.05);
        assert!(rep.passed, "{rep}");
    }
    // Identical steps on the parabola make every pair vanish unless a solution moves.
    assert!(!check_monotonicity_trick(&scale_first_solution(laplace_1d(), 10.0), 0.05).passed);
    assert!(!check_monotonicity_trick(&inflate_gradients(dirac15(), 100.0), 0.05).passed);
}

#[test]
fn uniqueness_for_two_mollifiers() {
    let a = laplace_1d();
    let b = run(
        Geometry::Interval { a: 0.0, b: 1.0 },
        1.0 / 64.0,
        2.0,
        BoundaryCondition::Dirichlet,
        Datum::density(DensityFn::Constant(1.0)),
        &[1, 2, 4],
        Mollifier::Polynomial,
    );
    let rep = check_uniqueness(a, &b, 1e-12);
    assert!(rep.passed, "{rep}");
    let twice = run(
        Geometry::Interval { a: 0.0, b: 1.0 },
        1.0 / 64.0,
        2.0,
        BoundaryCondition::Dirichlet,
        Datum::density(DensityFn::Constant(2.0)),
        &[1, 2, 4],
        Mollifier::Exponential,
    );
    assert!(!check_uniqueness(a, &twice, 1e-3).passed);
}

#[test]
fn neumann_uniqueness_up_to_constants() {
    let datum = Datum::density(DensityFn::Affine { c: -0.5, g: [1.0, 0.0] });
    let geo = Geometry::Rectangle { width: 1.0, height: 1.0 };
    let a = run(geo, 1.0 / 16.0, 1.5, BoundaryCondition::Neumann, datum.clone(), &[1, 2, 4], Mollifier::Exponential);
    let mut b = run(geo, 1.0 / 16.0, 1.5, BoundaryCondition::Neumann, datum, &[1, 2, 4], Mollifier::Polynomial);
    for s in &mut b.steps {
        s.solution.u.iter_mut().for_each(|v| *v += 0.75);
    }
    let rep = check_uniqueness(&a, &b, 1e-8);
    assert!(rep.passed, "{rep}");
    assert!((rep.get("kappa").unwrap() + 0.75).abs() < 1e-8);
}

#[test]
fn level_decay_on_dirac_run() {
    let r = dirac15();
    let m = check_truncation_energy(r).get("M").unwrap();
    let u = limit_field(r);
    let params = Params::lipschitz(2).unwrap();
    let t0 = auto_window(&u, r.problem.mesh.measures().iter().cloned().fold(0.0, f64::max)).unwrap().0;
    let rep = check_level_decay(&u, r.problem.operator.young(), &params, m, t0);
    assert!(rep.passed, "{rep}");
    assert_eq!(rep.get("branch_vanishing"), Some(0.0));
    assert!((rep.get("bound_slope").unwrap() + 2.0).abs() < 0.02, "{rep}");
    let bad = check_level_decay(&spike(&u, 1e6), r.problem.operator.young(), &params, m, t0);
    assert!(!bad.passed);
}

#[test]
fn level_decay_vanishes_above_the_dimension() {
    let r = dirac4();
    let m = check_truncation_energy(r).get("M").unwrap();
    let u = limit_field(r);
    let params = Params::lipschitz(2).unwrap();
    let t0 = u.max_abs() / 16.0;
    let rep = check_level_decay(&u, r.problem.operator.young(), &params, m, t0);
    assert!(rep.passed, "{rep}");
    assert_eq!(rep.get("branch_vanishing"), Some(1.0));
    assert!(rep.get("t1").unwrap().is_finite());
    let bad = check_level_decay(&spike(&u, 1e6), r.problem.operator.young(), &params, m, t0);
    assert!(!bad.passed);
}

#[test]
fn level_decay_is_tight_on_exact_power_distribution() {
    // |{u > t}| = t^{-2} on (1, 1000) for B = t^{3/2}/(3/2), n = σ = 2.
    let mut cells: Vec<(f64, f64)> = (0..4000)
        .map(|i| {
            let t = 1000f64.powf(i as f64 / 4000.0);
            let t2 = 1000f64.powf((i + 1) as f64 / 4000.0);
            (t2, t.powi(-2) - t2.powi(-2))
        })
        .collect();
    cells.push((1000.0 * (1.0 + 1e-12), 1e-6));
    let u = DiscreteField::from_cells(&cells).unwrap();
    let params = Params::lipschitz(2).unwrap();
    let rep = check_level_decay(&u, &power(1.5), &params, 1.0, 2.0);
    assert!(rep.passed, "{rep}");
    let first = &rep.rows[0];
    assert!((first[2] - first[1] * C_SLACK.powi(6)).abs() <= 1e-6 * first[2], "{first:?}");
    assert!((rep.get("fitted_slope").unwrap() + 2.0).abs() < 0.01, "{rep}");
}

fn oracle_fields(p: f64) -> (Field, Field, f64) {
    let prof = radial_oracle(&power(p), RadialDatum::PointMass { mass: 1.0 }, 1.0, 2).unwrap();
    let rings = 40_000;
    let r = |i: usize| 1e-8f64 * 1e8f64.powf(i as f64 / rings as f64);
    let mut u = Vec::new();
    let mut g = Vec::new();
    let mut cell: f64 = 0.0;
    for i in 0..rings {
        let (a, b) = (r(i), r(i + 1));
        let m = std::f64::consts::PI * (b * b - a * a);
        let mid = (a * b).sqrt();
        u.push((prof.value(mid), m));
        g.push((prof.gradient(mid), m));
        cell = cell.max(m);
    }
    (DiscreteField::from_cells(&u).unwrap(), DiscreteField::from_cells(&g).unwrap(), cell / 1e6)
}

#[test]
fn regularity_on_exact_oracle() {
    let (u, g, cell) = oracle_fields(1.5);
    let params = Params::lipschitz(2).unwrap();
    let rep = compare_fields(&u, &g, &power(1.5), &params, cell, None).unwrap();
    assert!(rep.passed, "{rep}");
    assert!((rep.get("u_slope").unwrap() + 2.0).abs() <= 0.02, "{rep}");
    assert!((rep.get("grad_slope").unwrap() + 1.0).abs() <= 0.01, "{rep}");
}

#[test]
fn regularity_above_the_dimension_reports_both_gradient_classes() {
    let (u, g, cell) = oracle_fields(4.0);
    let params = Params::lipschitz(2).unwrap();
    // |∇u| = (2πr)^{-1/3} ranges over (0.54, 250); fit inside that range.
    let rep = compare_fields(&u, &g, &power(4.0), &params, cell, Some(((1.0, 2.0), (1.0, 128.0)))).unwrap();
    assert!(rep.notes.iter().any(|n| n.contains("bounded")));
    assert!(rep.get("grad_predicted_theta").is_some() && rep.get("grad_predicted_psi").is_some());
    assert!((rep.get("grad_slope").unwrap() + 6.0).abs() < 0.06, "{rep}");
}

#[test]
fn regularity_on_fem_dirac_gradient() {
    let rep = compare_regularity(dirac15(), &Params::lipschitz(2).unwrap(), None).unwrap();
    assert!(rep.get("grad_slope").is_some() && rep.get("u_slope").is_some());
    assert!((rep.get("grad_slope").unwrap() + 1.0).abs() < 0.1, "{rep}");
}

#[test]
fn reports_serialize_every_section() {
    let reps = vec![check_truncation_energy(laplace_1d()), check_gradient_budget(laplace_1d())];
    let mut buf = Vec::new();
    write_reports(&mut buf, &reps).unwrap();
    let s = String::from_utf8(buf).unwrap();
    assert!(s.contains("[truncation_energy]") && s.contains("[gradient_budget]"));
    assert_eq!(s.matches("verdict = pass").count(), 2);
}
