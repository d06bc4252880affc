use numeric::{lit, Real};
use orlicz::{converges_at_infinity, regularity_weights, SobolevParams, YoungFunction};
use rearrange::{distribution, median, weak_fit, DiscreteField, RearrangeError, WeakFit};
use solver::{element_values, ApproximationRun, BoundaryCondition};

use crate::discrete::{f64_of, largest_cell};
use crate::report::CheckReport;

pub const SLOPE_REL_TOL: f64 = 0.05;
/// Fits only use levels whose distribution exceeds this many cell measures.
pub const MIN_CELLS: f64 = 10.0;
const FIT_LEVELS: i32 = 8;

/// Default fit window: the highest level (in quarter-octave steps below the
/// maximum) whose distribution exceeds [`MIN_CELLS`] cells, and seven octaves below.
pub fn auto_window<T: Real>(field: &DiscreteField<T>, cell: T) -> Option<(T, T)> {
    let floor = lit::<T>(MIN_CELLS) * cell;
    let step = lit::<T>(2.0).powf(lit(0.25));
    let mut hi = field.max_abs();
    if !(hi > T::zero()) {
        return None;
    }
    for _ in 0..400 {
        if distribution(field, hi) > floor {
            return Some((hi / lit::<T>(2.0).powi(FIT_LEVELS - 1), hi));
        }
        hi = hi / step;
    }
    None
}

fn fit_row(rep: &mut CheckReport, label: f64, fit: &WeakFit<impl Real>, gating: bool) -> bool {
    let ok = fit.agrees(numeric::lit(SLOPE_REL_TOL));
    rep.row(
        vec![label, f64_of(fit.fitted_slope), f64_of(fit.predicted_slope), f64_of(fit.slope_error()), if ok { 1.0 } else { 0.0 }],
        ok || !gating,
    );
    ok
}

/// Fits `u` against `Φ_σ` and `|∇u|` against `Ψ_σ` and `Θ`.
///
/// When `∫^∞ (t/B(t))^{1/(σ−1)} dt < ∞` the prediction for `u` is `L^∞`; the
/// `u` row is then replaced by the bound `max|u|`, and the gradient rows are
/// reported without gating the verdict. Otherwise the `u` and `Ψ_σ` rows gate
/// and `Θ` is informational. Row labels: 0 `u`/`Φ_σ`, 1 `∇u`/`Ψ_σ`, 2 `∇u`/`Θ`.
pub fn compare_fields<T: Real>(
    u: &DiscreteField<T>,
    grad: &DiscreteField<T>,
    b: &YoungFunction<T>,
    params: &SobolevParams<T>,
    cell: T,
    windows: Option<((T, T), (T, T))>,
) -> Result<CheckReport, RearrangeError> {
    let mut rep = CheckReport::new("regularity", &["field", "fitted_slope", "predicted_slope", "abs_error", "agrees"]);
    rep.tolerance("slope_rel_tol", SLOPE_REL_TOL);
    let w = regularity_weights(b, params);
    let bounded = converges_at_infinity(b, params.sigma);
    let empty = || RearrangeError::EmptyWindow { usable: 0, needed: rearrange::MIN_LEVELS };
    let wg = windows.map(|w| w.1).or_else(|| auto_window(grad, cell)).ok_or_else(empty)?;
    if bounded {
        rep.note("u predicted bounded");
        rep.constant("u_max", f64_of(u.max_abs()));
        rep.require(u.max_abs().is_finite(), "u is not finite");
    } else {
        let wu = windows.map(|w| w.0).or_else(|| auto_window(u, cell)).ok_or_else(empty)?;
        let fu = weak_fit(u, |t| w.big_phi(t), wu)?;
        rep.constant("u_slope", f64_of(fu.fitted_slope));
        rep.constant("u_predicted", f64_of(fu.predicted_slope));
        rep.constant("u_window_lo", f64_of(wu.0));
        rep.constant("u_window_hi", f64_of(wu.1));
        fit_row(&mut rep, 0.0, &fu, true);
    }
    let fg = weak_fit(grad, |t| w.psi(t), wg)?;
    rep.constant("grad_slope", f64_of(fg.fitted_slope));
    rep.constant("grad_predicted_psi", f64_of(fg.predicted_slope));
    rep.constant("grad_window_lo", f64_of(wg.0));
    rep.constant("grad_window_hi", f64_of(wg.1));
    let psi_ok = fit_row(&mut rep, 1.0, &fg, !bounded);
    if params.n >= 2 {
        let ft = weak_fit(grad, |t| w.theta(t), wg)?;
        rep.constant("grad_predicted_theta", f64_of(ft.predicted_slope));
        let theta_ok = fit_row(&mut rep, 2.0, &ft, false);
        rep.note(format!("gradient verdicts: psi = {psi_ok}, theta = {theta_ok}"));
    }
    Ok(rep)
}

/// [`compare_fields`] on the limit candidate of a run, with `|u − med(u)|` for
/// Neumann problems.
pub fn compare_regularity<T: Real>(
    run: &ApproximationRun<T>,
    params: &SobolevParams<T>,
    windows: Option<((T, T), (T, T))>,
) -> Result<CheckReport, RearrangeError> {
    let mesh = &*run.problem.mesh;
    let last = run.limit().ok_or(RearrangeError::EmptyField)?;
    let mut u = element_values(mesh, &last.solution.u);
    if run.problem.bc == BoundaryCondition::Neumann {
        let med = median(&u);
        u = u.map(|v| v - med);
    }
    let grad = last.solution.gradient.magnitude_field(mesh);
    compare_fields(&u, &grad, run.problem.operator.young(), params, largest_cell(mesh), windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use orlicz::{make_young, DensitySpec};
    use proptest::prelude::*;

    /// Cells with values on `2^{i/4}`, `i = 0..=48`, such that `|{v > t}| = t^{-a}`
    /// exactly at each grid value.
    fn power_field(a: f64) -> DiscreteField<f64> {
        let v = |i: i32| 2f64.powi(i / 4) * 2f64.powf((i % 4) as f64 / 4.0);
        let mu = |i: i32| v(i).powf(-a);
        let mut cells: Vec<(f64, f64)> = (0..48).map(|i| (v(i + 1), mu(i) - mu(i + 1))).collect();
        cells.push((v(49), mu(48)));
        DiscreteField::from_cells(&cells).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

        #[test]
        fn recovers_exact_power_slopes(p in 1.1f64..1.9) {
            let (n, b) = (2.0, make_young(&DensitySpec::PowerLaw { p }).unwrap());
            let (au, ag) = (n * (p - 1.0) / (n - p), n * (p - 1.0) / (n - 1.0));
            let params = SobolevParams::lipschitz(2).unwrap();
            let win = (2.0, 512.0);
            let rep = compare_fields(&power_field(au), &power_field(ag), &b, &params, 1e-30, Some((win, win))).unwrap();
            prop_assert!(rep.passed, "{}", rep);
            prop_assert!((rep.get("u_slope").unwrap() + au).abs() <= 1e-6);
            prop_assert!((rep.get("grad_slope").unwrap() + ag).abs() <= 1e-6);
            prop_assert!((rep.get("u_predicted").unwrap() + au).abs() <= 1e-3 * au);
        }
    }

    #[test]
    fn bounded_branch_reports_maximum() {
        let b = make_young(&DensitySpec::PowerLaw { p: 4.0 }).unwrap();
        let params = SobolevParams::lipschitz(2).unwrap();
        let u = DiscreteField::from_cells(&[(0.5, 1.0), (0.25, 2.0)]).unwrap();
        let rep = compare_fields(&u, &power_field(6.0), &b, &params, 1e-30, Some(((1.0, 2.0), (2.0, 512.0)))).unwrap();
        assert_eq!(rep.get("u_max"), Some(0.5));
        assert!(rep.get("u_slope").is_none());
        assert!((rep.get("grad_predicted_theta").unwrap() + 6.0).abs() < 1e-6);
    }
}
