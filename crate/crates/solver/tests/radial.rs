use std::f64::consts::PI;
use std::sync::Arc;

use numeric::adaptive;
use orlicz::{make_young, DensitySpec, Young};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solver::*;

fn power(p: f64) -> Young {
    make_young(&DensitySpec::PowerLaw { p }).unwrap()
}

#[test]
fn laplacian_constant_datum() {
    let prof = radial_oracle(&power(2.0), RadialDatum::Constant(1.0), 1.0, 2).unwrap();
    for r in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
        assert!((prof.value(r) - (1.0 - r * r) / 4.0).abs() < 1e-10, "r = {r}");
    }
}

#[test]
fn dirac_profile_for_subcritical_power() {
    let prof = radial_oracle(&power(1.5), RadialDatum::PointMass { mass: 1.0 }, 1.0, 2).unwrap();
    let c = (2.0 * PI).powi(-2);
    for r in [1e-4, 1e-2, 0.2, 0.5, 0.8] {
        assert!((prof.gradient(r) / (c * r.powi(-2)) - 1.0).abs() < 1e-9, "r = {r}");
        assert!((prof.value(r) / (c * (1.0 / r - 1.0)) - 1.0).abs() < 1e-8, "r = {r}");
    }
    assert!(prof.center_value().is_infinite());
}

#[test]
fn dirac_profile_is_bounded_above_the_dimension() {
    let prof = radial_oracle(&power(4.0), RadialDatum::PointMass { mass: 1.0 }, 1.0, 2).unwrap();
    let exact = 1.5 * (2.0 * PI).powf(-1.0 / 3.0);
    assert!((prof.center_value() / exact - 1.0).abs() < 1e-6);
}

#[test]
fn one_dimensional_flux() {
    let prof = radial_oracle(&power(3.0), RadialDatum::Constant(1.0), 1.0, 1).unwrap();
    assert!((prof.center_value() - 2.0 / 3.0).abs() < 1e-8);
    assert!((prof.value(0.5) - 2.0 / 3.0 * (1.0 - 0.5f64.powf(1.5))).abs() < 1e-9);
}

#[test]
fn rejects_non_integrable_density() {
    let f: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(|s: f64| s.powi(-3));
    assert!(radial_oracle(&power(2.0), RadialDatum::Density(f), 1.0, 2).is_err());
}

/// `2π ∫ r·b(|u′|)·sign(u′)·φ′ dr − ∫ f φ` for `φ(r) = (1 − r²)·Σ cⱼ rʲ`.
fn weak_residual(young: &Young, prof: &Profile, f: &dyn Fn(f64) -> f64, point: f64, c: &[f64]) -> f64 {
    let poly = |r: f64| c.iter().enumerate().map(|(j, cj)| cj * r.powi(j as i32)).sum::<f64>();
    let dpoly = |r: f64| c.iter().enumerate().skip(1).map(|(j, cj)| j as f64 * cj * r.powi(j as i32 - 1)).sum::<f64>();
    let phi = |r: f64| (1.0 - r * r) * poly(r);
    let dphi = |r: f64| -2.0 * r * poly(r) + (1.0 - r * r) * dpoly(r);
    let lhs = |r: f64| {
        let d = prof.derivative(r);
        r * young.density(d.abs()) * d.signum() * dphi(r)
    };
    let a = 2.0 * PI * adaptive(lhs, 0.0, 1.0, 1e-12, 0.0).value;
    let b = 2.0 * PI * adaptive(|r| r * f(r) * phi(r), 0.0, 1.0, 1e-12, 0.0).value;
    a - b - point * phi(0.0)
}

#[test]
fn weak_form_against_random_radial_tests() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<(f64, RadialDatum<f64>, Box<dyn Fn(f64) -> f64>, f64)> = vec![
        (2.0, RadialDatum::Constant(1.0), Box::new(|_| 1.0), 0.0),
        (1.5, RadialDatum::Constant(2.0), Box::new(|_| 2.0), 0.0),
        (3.0, RadialDatum::Density(Arc::new(|s: f64| 1.0 + s * s)), Box::new(|s: f64| 1.0 + s * s), 0.0),
        (1.5, RadialDatum::PointMass { mass: 1.0 }, Box::new(|_| 0.0), 1.0),
        (4.0, RadialDatum::PointMass { mass: 2.0 }, Box::new(|_| 0.0), 2.0),
    ];
    let mut worst: f64 = 0.0;
    for (p, datum, f, point) in cases {
        let young = power(p);
        let prof = radial_oracle(&young, datum, 1.0, 2).unwrap();
        for _ in 0..10 {
            let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            worst = worst.max(weak_residual(&young, &prof, &*f, point, &c).abs());
        }
    }
    assert!(worst <= 1e-6, "{worst:e}");
}
