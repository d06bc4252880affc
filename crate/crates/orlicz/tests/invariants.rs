use orlicz::{
    conjugate, growth_indices, make_young, regularity_weights, sobolev_conjugate, DensitySpec, SobolevParams, Young,
};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = DensitySpec<f64>> {
    prop_oneof![
        (1.1f64..6.0).prop_map(|p| DensitySpec::PowerLaw { p }),
        (1.2f64..5.0, 0.0f64..3.0).prop_map(|(p, beta)| DensitySpec::PowerLog { p, beta }),
        (0.1f64..3.0, 0.05f64..4.0, 0.2f64..4.0)
            .prop_map(|(c, e1, e2)| DensitySpec::PowerSum { terms: vec![(c, e1), (1.0, e1 + e2)] }),
        (0.2f64..3.0, 0.2f64..3.0, 0.2f64..3.0).prop_map(|(e0, e1, e2)| DensitySpec::PiecewiseDensity {
            breakpoints: vec![0.5, 4.0],
            exponents: vec![e0, e1, e2],
        }),
    ]
}

fn young(spec: &DensitySpec<f64>) -> Young {
    make_young(spec).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn b_sandwich_at_grid_nodes(spec in family()) {
        let b = young(&spec);
        let g = b.grid();
        for j in (0..g.t.len()).step_by(7) {
            let t = g.t[j];
            let lower = 0.5 * t * b.density(0.5 * t);
            prop_assert!(lower <= g.big_b[j] * (1.0 + 1e-10), "lower at {t}");
            prop_assert!(g.big_b[j] <= t * g.b[j] * (1.0 + 1e-10), "upper at {t}");
        }
        prop_assert!(g.is_convex(1e-8));
    }

    #[test]
    fn conjugate_sandwich_at_grid_nodes(spec in family()) {
        let b = young(&spec);
        let c = conjugate(&b);
        let g = c.grid();
        for j in (0..g.t.len()).step_by(97) {
            let s = g.t[j];
            let inv = b.inverse_density(s);
            let bt = g.big_b[j];
            prop_assert!(b.value(b.inverse_density(0.5 * s)) <= bt * (1.0 + 1e-9), "half-level lower at {s}");
            if inv * b.density(inv) >= 1.25 * b.value(inv) {
                prop_assert!(0.25 * b.value(inv) <= bt * (1.0 + 1e-9), "lower at {s}");
            }
            prop_assert!(bt <= b.value(2.0 * inv) * (1.0 + 1e-9), "upper at {s}");
        }
    }

    #[test]
    fn monotone_quotients(spec in family()) {
        let b = young(&spec);
        let ix = growth_indices(&b).unwrap();
        let g = b.grid();
        for j in 0..g.t.len() - 1 {
            let (t0, t1) = (g.t[j], g.t[j + 1]);
            let lo0 = g.big_b[j] / t0.powf(ix.i_b);
            let lo1 = g.big_b[j + 1] / t1.powf(ix.i_b);
            prop_assert!(lo1 >= lo0 * (1.0 - 1e-9), "B/t^i decreases at {t0}");
            let hi0 = g.big_b[j] / t0.powf(ix.s_b);
            let hi1 = g.big_b[j + 1] / t1.powf(ix.s_b);
            prop_assert!(hi1 <= hi0 * (1.0 + 1e-9), "B/t^s increases at {t0}");
        }
    }

    #[test]
    fn index_duality(spec in family()) {
        let b = young(&spec);
        let ix = growth_indices(&b).unwrap();
        let cx = growth_indices(&conjugate(&b)).unwrap();
        let dual = |x: f64| x / (x - 1.0);
        prop_assert!((cx.i_b - dual(ix.s_b)).abs() <= 0.02 * dual(ix.s_b), "{cx:?} vs {ix:?}");
        prop_assert!((cx.s_b - dual(ix.i_b)).abs() <= 0.02 * dual(ix.i_b), "{cx:?} vs {ix:?}");
    }

    #[test]
    fn phi_equals_h_power(spec in family(), sigma in 2.0f64..5.0, lt in -10.0f64..30.0) {
        let b = young(&spec);
        let sc = sobolev_conjugate(&b, &SobolevParams::new(2, sigma).unwrap());
        let s = lt.exp();
        let phi = sc.phi(s);
        let h = sc.h_sigma(s).powf(sc.sigma_prime());
        prop_assert!((phi - h).abs() <= 1e-8 * phi);
    }

    #[test]
    fn involution_on_grid(p in 1.3f64..4.0, beta in 0.0f64..2.0) {
        let b = young(&DensitySpec::PowerLog { p, beta });
        let cc = conjugate(&conjugate(&b));
        for t in [1e-3, 0.2, 1.0, 30.0, 1e4] {
            let (x, y) = (cc.value(t), b.value(t));
            prop_assert!((x - y).abs() <= 1e-6 * y, "t = {t}: {x} vs {y}");
        }
    }
}

const WIN_LO: f64 = 1000.0;
const WIN_HI: f64 = 2000.0;

/// Slope of `ln w` against `ln t` over `[a, b]` in logarithmic variables.
fn slope(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let xs: Vec<f64> = (0..9).map(|i| a + (b - a) * i as f64 / 8.0).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    numeric::ls_slope(&xs, &ys).unwrap().slope
}

#[test]
fn neumann_table_slopes_for_user_sigma() {
    let cases = [(1.5, 1.0, 3.0), (2.0, 0.5, 4.0), (3.0, 2.0, 4.0), (2.5, 0.0, 3.5)];
    for (p, beta, sigma) in cases {
        let b = young(&DensitySpec::PowerLog { p, beta });
        let w = regularity_weights(&b, &SobolevParams::new(2, sigma).unwrap());
        let q_u = sigma * (p - 1.0) / (sigma - p);
        let g_u = beta * p / (sigma - p);
        let q_g = sigma * (p - 1.0) / (sigma - 1.0);
        let g_g = beta / (sigma - 1.0);
        let (a, c) = (WIN_LO, WIN_HI);
        let closed = |q: f64, g: f64| slope(|l| q * l + g * l.ln(), a, c);
        let phi = slope(|l| w.ln_big_phi(l), a, c);
        let psi = slope(|l| w.ln_psi(l), a, c);
        assert!((phi - closed(q_u, g_u)).abs() <= 0.02, "Φ p={p} β={beta} σ={sigma}: {phi}");
        assert!((psi - closed(q_g, g_g)).abs() <= 0.02, "Ψ p={p} β={beta} σ={sigma}: {psi}");
    }
}

#[test]
fn critical_row_gradient_weight() {
    let (sigma, beta) = (3.0, 1.0);
    let b = young(&DensitySpec::PowerLog { p: sigma, beta });
    let w = regularity_weights(&b, &SobolevParams::new(2, sigma).unwrap());
    let g = beta * sigma / (sigma - 1.0) - 1.0;
    let (a, c) = (WIN_LO, WIN_HI);
    let closed = slope(|l| sigma * l + g * l.ln(), a, c);
    let psi = slope(|l| w.ln_psi(l), a, c);
    assert!((psi - closed).abs() <= 0.02, "{psi} vs {closed}");
}
