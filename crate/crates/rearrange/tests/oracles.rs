use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rearrange::{distribution, rearrangement, tail_integral, weak_fit, Field};
use std::f64::consts::PI;

#[test]
fn rearrangement_preserves_l1_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cells: Vec<(f64, f64)> = (0..10_000).map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(1e-4..1e-2))).collect();
    let u = Field::from_cells(&cells).unwrap();
    let direct: f64 = cells.iter().map(|(v, m)| v.abs() * m).sum();
    let r = rearrangement(&u);
    assert!((r.integral_to(u.total_measure()) - direct).abs() <= 1e-12 * direct);
}

#[test]
fn tail_integral_dominates_random_subsets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 400;
    let cells: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(-3.0..3.0), 0.01)).collect();
    let g = Field::from_cells(&cells).unwrap();
    let k = 120;
    let s = 0.01 * k as f64;
    let best = tail_integral(&g, s);
    for _ in 0..200 {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.gen_range(i..n);
            idx.swap(i, j);
        }
        let on_e: f64 = idx[..k].iter().map(|&i| cells[i].0.abs() * 0.01).sum();
        assert!(on_e <= best * (1.0 + 1e-12));
    }
}

/// Cells with `|{|u| > t_j}| = t_j^{−3}` exactly on a dyadic ladder.
#[test]
fn synthetic_power_distribution() {
    let levels: Vec<f64> = (0..16).map(|j| 2f64.powi(j)).collect();
    let mut cells = Vec::new();
    for (j, &t) in levels.iter().enumerate() {
        let next = levels.get(j + 1).map_or(0.0, |n| n.powi(-3));
        cells.push((1.5 * t, t.powi(-3) - next));
    }
    cells.push((0.5, 1.0));
    let u = Field::from_cells(&cells).unwrap();
    for &t in &levels {
        assert!((distribution(&u, t) - t.powi(-3)).abs() <= 1e-15 * t.powi(-3) + 1e-300);
    }
    let fit = weak_fit(&u, |t| t.powi(3), (1.0, 2f64.powi(15))).unwrap();
    assert!((fit.fitted_slope + 3.0).abs() <= 1e-6);
    assert!((fit.predicted_slope + 3.0).abs() <= 1e-12);
    assert!((fit.sup_proxy - 1.0).abs() <= 1e-12);
}

/// Radial Dirac profile for `b(t) = t^{1/2}` on the unit disc: `u = c(1/r − 1)`, `|∇u| = c/r²`.
fn radial_fields() -> (Field, Field) {
    let c = 1.0 / (4.0 * PI * PI);
    let rings = 40_000;
    let (r_min, r_max) = (1e-9f64, 1.0f64);
    let mut u = Vec::with_capacity(rings + 1);
    let mut g = Vec::with_capacity(rings + 1);
    u.push((c * (1.0 / (0.5 * r_min) - 1.0), PI * r_min * r_min));
    g.push((c / (0.25 * r_min * r_min), PI * r_min * r_min));
    for i in 0..rings {
        let a = r_min * (r_max / r_min).powf(i as f64 / rings as f64);
        let b = r_min * (r_max / r_min).powf((i + 1) as f64 / rings as f64);
        let r = (a * b).sqrt();
        let m = PI * (b * b - a * a);
        u.push((c * (1.0 / r - 1.0), m));
        g.push((c / (r * r), m));
    }
    (Field::from_cells(&u).unwrap(), Field::from_cells(&g).unwrap())
}

#[test]
fn radial_dirac_profile_slopes() {
    let (u, g) = radial_fields();
    let fu = weak_fit(&u, |t| t * t, (100.0, 100.0 * 2f64.powi(12))).unwrap();
    assert!((fu.fitted_slope + 2.0).abs() <= 0.01, "{}", fu.fitted_slope);
    assert!(fu.agrees(0.01));
    let fg = weak_fit(&g, |t| t, (100.0, 100.0 * 2f64.powi(12))).unwrap();
    assert!((fg.fitted_slope + 1.0).abs() <= 0.01, "{}", fg.fitted_slope);
    assert!(fg.agrees(0.01));
}
