use numeric::Real;
use solver::{cauchy_table, ApproximationRun};

use crate::discrete::{f64_of, largest_cell};
use crate::report::CheckReport;

fn non_increasing(seq: &[f64], slack: f64) -> bool {
    seq.windows(2).all(|w| w[1] <= w[0] + slack)
}

/// `d_{km} = |{|u_k − u_m| > τ}|`, and the same for gradients, must not grow
/// (beyond one cell measure) as the coarser index moves towards the finer one:
/// along each column `i ↦ d[i][j]`, and along the first superdiagonal from its
/// first nonzero entry on (coarse pairs may not yet separate by `τ`).
pub fn check_cauchy_in_measure<T: Real>(run: &ApproximationRun<T>, taus: &[T]) -> CheckReport {
    let mut rep = CheckReport::new("cauchy_in_measure", &["tau", "gradient", "k_i", "k_j", "measure"]);
    let mesh = &*run.problem.mesh;
    let cell = f64_of(largest_cell(mesh));
    rep.tolerance("cell_measure", cell);
    if run.steps.len() < 3 {
        rep.require(false, format!("need at least 3 steps, got {}", run.steps.len()));
        return rep;
    }
    let table = cauchy_table(&run.problem, &run.steps, taus);
    let n = table.ks.len();
    let mut largest_last = 0.0f64;
    for (ti, &tau) in table.taus.iter().enumerate() {
        for (kind, d) in [(0.0, &table.values[ti]), (1.0, &table.gradients[ti])] {
            for i in 0..n {
                for j in i + 1..n {
                    rep.row(vec![f64_of(tau), kind, table.ks[i] as f64, table.ks[j] as f64, f64_of(d[i][j])], true);
                }
            }
            for j in 1..n {
                let col: Vec<f64> = (0..j).map(|i| f64_of(d[i][j])).collect();
                rep.require(non_increasing(&col, cell), format!("tau = {}, kind {kind}: column {j} grows: {col:?}", f64_of(tau)));
            }
            let diag: Vec<f64> = (0..n - 1).map(|i| f64_of(d[i][i + 1])).skip_while(|v| *v == 0.0).collect();
            rep.require(non_increasing(&diag, cell), format!("tau = {}, kind {kind}: superdiagonal grows: {diag:?}", f64_of(tau)));
            if kind == 0.0 {
                largest_last = largest_last.max(f64_of(d[n - 2][n - 1]));
            }
        }
    }
    rep.constant("last_pair_measure", largest_last);
    rep
}
