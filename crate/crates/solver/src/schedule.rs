use numeric::{lit, Real};
use rearrange::{distribution, DiscreteField};

use crate::datum::mollify_datum;
use crate::error::SolverError;
use crate::newton::{element_values, solve_weak, Solution, SolveOptions};
use crate::problem::ProblemSpec;

/// One solved approximating problem.
#[derive(Debug, Clone)]
pub struct StepRecord<T> {
    pub k: usize,
    pub datum: DiscreteField<T>,
    pub datum_l1: T,
    pub solution: Solution<T>,
    /// `∫ b(|∇u_k|)`.
    pub gradient_integral: T,
}

/// `d[τ][i][j] = |{|u_{kᵢ} − u_{kⱼ}| > τ}|`, and the same for gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyTable<T> {
    pub taus: Vec<T>,
    pub ks: Vec<usize>,
    pub values: Vec<Vec<Vec<T>>>,
    pub gradients: Vec<Vec<Vec<T>>>,
}

/// The sequence `(f_k, u_k)` with convergence diagnostics.
#[derive(Debug, Clone)]
pub struct ApproximationRun<T: Real> {
    pub problem: ProblemSpec<T>,
    /// `‖f‖_{L¹}` or `‖μ‖(Ω)`.
    pub datum_norm: T,
    pub steps: Vec<StepRecord<T>>,
    /// First failing scale, when the run stopped early.
    pub failure: Option<(usize, SolverError)>,
    pub cauchy: CauchyTable<T>,
}

impl<T: Real> ApproximationRun<T> {
    /// The limit candidate: the solution at the largest completed scale.
    pub fn limit(&self) -> Option<&StepRecord<T>> {
        self.steps.last()
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// `∫ b(|∇u|)` over the mesh.
pub fn gradient_integral<T: Real>(problem: &ProblemSpec<T>, sol: &Solution<T>) -> T {
    let b = problem.operator.young();
    sol.gradient
        .magnitudes()
        .iter()
        .zip(problem.mesh.measures())
        .map(|(t, a)| b.density(*t) * *a)
        .sum()
}

fn exceed<T: Real>(measures: &[T], diff: impl Fn(usize) -> T, tau: T) -> T {
    let vals: Vec<T> = (0..measures.len()).map(diff).collect();
    let f = DiscreteField::new(vals, measures.to_vec()).expect("positive measures");
    distribution(&f, tau)
}

/// Builds the Cauchy-in-measure matrices on the given τ-grid.
pub fn cauchy_table<T: Real>(problem: &ProblemSpec<T>, steps: &[StepRecord<T>], taus: &[T]) -> CauchyTable<T> {
    let mesh = &*problem.mesh;
    let m = mesh.measures();
    let vals: Vec<Vec<T>> = steps.iter().map(|s| element_values(mesh, &s.solution.u).values().to_vec()).collect();
    let grads: Vec<&Vec<[T; 2]>> = steps.iter().map(|s| &s.solution.gradient.vectors).collect();
    let n = steps.len();
    let mut values = Vec::new();
    let mut gradients = Vec::new();
    for &tau in taus {
        let mut dv = vec![vec![T::zero(); n]; n];
        let mut dg = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let a = exceed(m, |e| vals[i][e] - vals[j][e], tau);
                let b = exceed(m, |e| (grads[i][e][0] - grads[j][e][0]).hypot(grads[i][e][1] - grads[j][e][1]), tau);
                dv[i][j] = a;
                dv[j][i] = a;
                dg[i][j] = b;
                dg[j][i] = b;
            }
        }
        values.push(dv);
        gradients.push(dg);
    }
    CauchyTable { taus: taus.to_vec(), ks: steps.iter().map(|s| s.k).collect(), values, gradients }
}

/// Default τ-grid: `{10⁻³, 10⁻², 10⁻¹}·max|u|` at the finest completed scale.
pub fn default_taus<T: Real>(steps: &[StepRecord<T>]) -> Vec<T> {
    let top = steps
        .last()
        .map(|s| s.solution.u.iter().fold(T::zero(), |m, v| m.max(v.abs())))
        .unwrap_or(T::one());
    let top = if top > T::zero() { top } else { T::one() };
    [1e-3, 1e-2, 1e-1].iter().map(|&c| top * lit(c)).collect()
}

/// Mollifies the datum at each scale, solves, and records diagnostics. Each
/// solve is warm-started from the previous one. A failing scale ends the run
/// and is reported in [`ApproximationRun::failure`].
pub fn run_schedule<T: Real>(
    problem: &ProblemSpec<T>,
    k_list: &[usize],
    opts: &SolveOptions<T>,
    taus: Option<&[T]>,
) -> Result<ApproximationRun<T>, SolverError> {
    if k_list.len() < 3 || k_list.windows(2).any(|w| w[1] <= w[0]) || k_list[0] == 0 {
        return Err(SolverError::InvalidSchedule(format!("k_list must be increasing, positive, length ≥ 3: {k_list:?}")));
    }
    problem.operator.require_admissible()?;
    let mesh = &*problem.mesh;
    let datum_norm = problem.datum.total_variation(mesh);
    let mut steps: Vec<StepRecord<T>> = Vec::new();
    let mut failure = None;
    for &k in k_list {
        let outcome = mollify_datum(mesh, &problem.datum, k, problem.bc, problem.mollifier).and_then(|f| {
            let warm = steps.last().map(|s| s.solution.u.as_slice());
            solve_weak(problem, &f, opts, warm).map(|sol| (f, sol))
        });
        match outcome {
            Ok((f, solution)) => {
                let gradient_integral = gradient_integral(problem, &solution);
                steps.push(StepRecord { k, datum_l1: f.l1_norm(), datum: f, solution, gradient_integral });
            }
            Err(e) => {
                failure = Some((k, e));
                break;
            }
        }
    }
    let taus = taus.map(|t| t.to_vec()).unwrap_or_else(|| default_taus(&steps));
    let cauchy = cauchy_table(problem, &steps, &taus);
    Ok(ApproximationRun { problem: problem.clone(), datum_norm, steps, failure, cauchy })
}
