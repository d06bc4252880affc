use numeric::{lit, Real};
use rayon::prelude::*;
use rearrange::{median, DiscreteField};

use crate::error::SolverError;
use crate::mesh::Mesh;
use crate::operator::OperatorField;
use crate::problem::{BoundaryCondition, ProblemSpec};
use crate::sparse::{pcg, CsrMatrix, IncompleteCholesky};

/// Newton stopping rule and Hessian regularization.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<T> {
    /// Bound on the maximal nodal residual.
    pub tol: T,
    pub max_newton: usize,
    /// `ε` relative to the largest initial gradient; `b(t)/t` is frozen below `ε`.
    pub eps_rel: T,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions { tol: lit(1e-10), max_newton: 200, eps_rel: lit(1e-8) }
    }
}

/// Element-wise constant gradients of a P1 function.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField<T> {
    pub vectors: Vec<[T; 2]>,
}

impl<T: Real> GradientField<T> {
    pub fn of(mesh: &Mesh<T>, u: &[T]) -> Self {
        let vectors = (0..mesh.element_count()).map(|e| element_gradient(mesh, e, u)).collect();
        GradientField { vectors }
    }

    pub fn magnitudes(&self) -> Vec<T> {
        self.vectors.iter().map(|g| g[0].hypot(g[1])).collect()
    }

    /// `|∇u|` as a piecewise-constant field.
    pub fn magnitude_field(&self, mesh: &Mesh<T>) -> DiscreteField<T> {
        DiscreteField::new(self.magnitudes(), mesh.measures().to_vec()).expect("positive measures")
    }
}

fn element_gradient<T: Real>(mesh: &Mesh<T>, e: usize, u: &[T]) -> [T; 2] {
    let gr = mesh.shape_gradients(e);
    let mut g = [T::zero(); 2];
    for (i, &v) in mesh.vertices(e).iter().enumerate() {
        g[0] += u[v] * gr[i][0];
        g[1] += u[v] * gr[i][1];
    }
    g
}

/// Barycentric values of a nodal function, one per element.
pub fn element_values<T: Real>(mesh: &Mesh<T>, u: &[T]) -> DiscreteField<T> {
    let vals = (0..mesh.element_count())
        .map(|e| {
            let vs = mesh.vertices(e);
            vs.iter().map(|&v| u[v]).sum::<T>() / T::from_usize(vs.len()).unwrap()
        })
        .collect();
    DiscreteField::new(vals, mesh.measures().to_vec()).expect("positive measures")
}

/// Converged discrete solution.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub u: Vec<T>,
    pub gradient: GradientField<T>,
    pub iterations: usize,
    pub energy: T,
    pub residual: T,
    /// Energy after the initial guess and after every accepted Newton step.
    pub energy_trace: Vec<T>,
    /// Constant added to enforce the Neumann median normalization.
    pub shift: T,
}

/// Nodal loads `Fᵢ = ∫ f_h φᵢ` for piecewise-constant `f_h`.
pub fn nodal_loads<T: Real>(mesh: &Mesh<T>, f: &DiscreteField<T>) -> Vec<T> {
    let mut out = vec![T::zero(); mesh.node_count()];
    for (e, &fe) in f.values().iter().enumerate() {
        let vs = mesh.vertices(e);
        let share = fe * mesh.measures()[e] / T::from_usize(vs.len()).unwrap();
        for &v in vs {
            out[v] += share;
        }
    }
    out
}

struct System<'a, T: Real> {
    mesh: &'a Mesh<T>,
    op: &'a OperatorField<T>,
    weights: Vec<T>,
    dof: Vec<Option<usize>>,
    ndof: usize,
    matrix: CsrMatrix<T>,
    slots: Vec<[usize; 9]>,
    loads: Vec<T>,
    singular: bool,
}

struct Local<T> {
    grad: [T; 3],
    hess: [T; 9],
}

impl<'a, T: Real> System<'a, T> {
    fn new(mesh: &'a Mesh<T>, op: &'a OperatorField<T>, bc: BoundaryCondition, loads: Vec<T>) -> Self {
        let nn = mesh.node_count();
        let mut dof = vec![None; nn];
        let mut ndof = 0;
        for i in 0..nn {
            if bc == BoundaryCondition::Neumann || !mesh.boundary()[i] {
                dof[i] = Some(ndof);
                ndof += 1;
            }
        }
        let mut rows: Vec<Vec<usize>> = (0..ndof).map(|d| vec![d]).collect();
        for e in 0..mesh.element_count() {
            let vs = mesh.vertices(e);
            for &a in vs {
                for &b in vs {
                    if let (Some(da), Some(db)) = (dof[a], dof[b]) {
                        rows[da].push(db);
                    }
                }
            }
        }
        let matrix = CsrMatrix::from_pattern(rows);
        let slots = (0..mesh.element_count())
            .map(|e| {
                let vs = mesh.vertices(e);
                let mut s = [usize::MAX; 9];
                for (i, &a) in vs.iter().enumerate() {
                    for (j, &b) in vs.iter().enumerate() {
                        if let (Some(da), Some(db)) = (dof[a], dof[b]) {
                            s[3 * i + j] = matrix.position(da, db).unwrap();
                        }
                    }
                }
                s
            })
            .collect();
        let weights = (0..mesh.element_count()).map(|e| op.weight().at(mesh.barycenter(e))).collect();
        System { mesh, op, weights, dof, ndof, matrix, slots, loads, singular: bc == BoundaryCondition::Neumann }
    }

    fn energy(&self, u: &[T]) -> T {
        let b = self.op.young();
        let inner: T = (0..self.mesh.element_count())
            .into_par_iter()
            .map(|e| {
                let g = element_gradient(self.mesh, e, u);
                self.weights[e] * b.value(g[0].hypot(g[1])) * self.mesh.measures()[e]
            })
            .collect::<Vec<T>>()
            .into_iter()
            .sum();
        inner - u.iter().zip(&self.loads).map(|(a, f)| *a * *f).sum::<T>()
    }

    fn local(&self, e: usize, u: &[T], eps: T, linear: bool) -> Local<T> {
        let mesh = self.mesh;
        let nv = mesh.dimension() + 1;
        let gr = mesh.shape_gradients(e);
        let g = element_gradient(mesh, e, u);
        let t = g[0].hypot(g[1]);
        let aw = self.weights[e] * mesh.measures()[e];
        let b = self.op.young();
        let (c1, c2, flux) = if linear {
            (T::one(), T::zero(), T::zero())
        } else if t < eps {
            let ratio = b.density(eps) / eps;
            let fl = if t > T::zero() { b.density(t) / t } else { T::zero() };
            (ratio, T::zero(), fl)
        } else {
            let bt = b.density(t);
            (bt / t, b.density_slope(t) - bt / t, bt / t)
        };
        let gh = if t > T::zero() { [g[0] / t, g[1] / t] } else { [T::zero(); 2] };
        let mut out = Local { grad: [T::zero(); 3], hess: [T::zero(); 9] };
        for i in 0..nv {
            let gi = gr[i];
            out.grad[i] = aw * flux * (g[0] * gi[0] + g[1] * gi[1]);
            let pi = gh[0] * gi[0] + gh[1] * gi[1];
            for j in 0..nv {
                let gj = gr[j];
                let pj = gh[0] * gj[0] + gh[1] * gj[1];
                out.hess[3 * i + j] = aw * (c1 * (gi[0] * gj[0] + gi[1] * gj[1]) + c2 * pi * pj);
            }
        }
        out
    }

    /// Fills the Hessian and returns the residual on free degrees of freedom.
    fn assemble(&mut self, u: &[T], eps: T, linear: bool) -> Vec<T> {
        let locals: Vec<Local<T>> =
            (0..self.mesh.element_count()).into_par_iter().map(|e| self.local(e, u, eps, linear)).collect();
        self.matrix.clear();
        let mut res = vec![T::zero(); self.ndof];
        for (e, loc) in locals.iter().enumerate() {
            let vs = self.mesh.vertices(e);
            for (i, &a) in vs.iter().enumerate() {
                if let Some(da) = self.dof[a] {
                    res[da] += loc.grad[i];
                }
                for j in 0..vs.len() {
                    let s = self.slots[e][3 * i + j];
                    if s != usize::MAX {
                        self.matrix.vals[s] += loc.hess[3 * i + j];
                    }
                }
            }
        }
        for (node, d) in self.dof.iter().enumerate() {
            if let Some(d) = d {
                res[*d] -= self.loads[node];
            }
        }
        res
    }

    fn solve_linear(&self, rhs: &[T], rel: T) -> Vec<T> {
        let shift = if self.singular { lit(1e-8) } else { T::zero() };
        let pre = IncompleteCholesky::new(&self.matrix, shift);
        let mut x = vec![T::zero(); self.ndof];
        pcg(&self.matrix, &pre, rhs, &mut x, rel, 20_000, self.singular);
        x
    }

    fn scatter(&self, u: &mut [T], d: &[T], alpha: T) {
        for (node, slot) in self.dof.iter().enumerate() {
            if let Some(k) = slot {
                u[node] += alpha * d[*k];
            }
        }
    }

    /// Minimizes `s ↦ J(s·v)` for the profile `v`.
    fn best_multiple(&self, v: &[T]) -> T {
        let b = self.op.young();
        let fv: T = v.iter().zip(&self.loads).map(|(a, f)| *a * *f).sum();
        let grads: Vec<(T, T)> = (0..self.mesh.element_count())
            .map(|e| {
                let g = element_gradient(self.mesh, e, v);
                (g[0].hypot(g[1]), self.weights[e] * self.mesh.measures()[e])
            })
            .filter(|(t, _)| *t > T::zero())
            .collect();
        if !(fv > T::zero()) || grads.is_empty() {
            return T::zero();
        }
        let dphi = |ls: T| {
            let s = ls.exp();
            grads.iter().map(|&(t, w)| w * t * b.density(s * t)).sum::<T>() - fv
        };
        let (mut lo, mut hi) = (-T::one(), T::one());
        while dphi(lo) > T::zero() && lo > lit(-700.0) {
            lo = lo * lit(2.0);
        }
        while dphi(hi) < T::zero() && hi < lit(700.0) {
            hi = hi * lit(2.0);
        }
        for _ in 0..100 {
            let mid = (lo + hi) * lit(0.5);
            if dphi(mid) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        ((lo + hi) * lit(0.5)).exp()
    }
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn subtract_mean<T: Real>(u: &mut [T]) {
    let m = u.iter().copied().sum::<T>() / T::from_usize(u.len()).unwrap();
    u.iter_mut().for_each(|x| *x -= m);
}

const ARMIJO: f64 = 1e-4;

/// Minimizes `J(u) = ∫ a·B(|∇u|) − ∫ f_h u` over P1 functions by damped Newton.
///
/// Dirichlet problems fix boundary nodes at zero; Neumann problems are solved
/// up to constants and then shifted so that the element-value median is zero.
pub fn solve_weak<T: Real>(
    problem: &ProblemSpec<T>,
    f_h: &DiscreteField<T>,
    opts: &SolveOptions<T>,
    warm: Option<&[T]>,
) -> Result<Solution<T>, SolverError> {
    problem.operator.require_admissible()?;
    let mesh = &*problem.mesh;
    if f_h.len() != mesh.element_count() {
        return Err(SolverError::DatumMismatch { got: f_h.len(), expected: mesh.element_count() });
    }
    let loads = nodal_loads(mesh, f_h);
    let mut sys = System::new(mesh, &problem.operator, problem.bc, loads);
    let nn = mesh.node_count();
    let mut u = vec![T::zero(); nn];

    let profile = match warm {
        Some(w) if w.len() == nn => w.to_vec(),
        _ => {
            let r0 = sys.assemble(&u, T::one(), true);
            let rhs: Vec<T> = r0.iter().map(|r| -*r).collect();
            let d = sys.solve_linear(&rhs, lit(1e-12));
            let mut v = vec![T::zero(); nn];
            sys.scatter(&mut v, &d, T::one());
            v
        }
    };
    let s = sys.best_multiple(&profile);
    if s > T::zero() {
        u.iter_mut().zip(&profile).for_each(|(a, b)| *a = *b * s);
    }
    if sys.singular {
        subtract_mean(&mut u);
    }
    let scale = GradientField::of(mesh, &u).magnitudes().into_iter().fold(T::zero(), T::max);
    let eps = opts.eps_rel * if scale > T::zero() { scale } else { T::one() };

    let mut energy = sys.energy(&u);
    let mut trace = vec![energy];
    let mut residual = T::infinity();
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..=opts.max_newton {
        let res = sys.assemble(&u, eps, false);
        residual = max_abs(&res);
        iterations = it;
        if residual <= opts.tol {
            converged = true;
            break;
        }
        if it == opts.max_newton {
            break;
        }
        let rhs: Vec<T> = res.iter().map(|r| -*r).collect();
        let rel = (residual * lit(1e-2)).max(lit(1e-13)).min(lit(1e-6));
        let d = sys.solve_linear(&rhs, rel);
        let slope: T = d.iter().zip(&res).map(|(a, b)| *a * *b).sum();
        let d = if slope < T::zero() { d } else { rhs };
        let slope: T = d.iter().zip(&res).map(|(a, b)| *a * *b).sum();
        let mut alpha = T::one();
        let mut accepted = false;
        let mut trial = u.clone();
        for _ in 0..80 {
            trial.copy_from_slice(&u);
            sys.scatter(&mut trial, &d, alpha);
            let e1 = sys.energy(&trial);
            if e1 <= energy + lit::<T>(ARMIJO) * alpha * slope {
                energy = e1;
                accepted = true;
                break;
            }
            // Below roundoff in J, fall back to the approximate Wolfe test on
            // the directional derivative, which stays accurate.
            if e1 <= energy + lit::<T>(1e-12) * (energy.abs() + T::one()) {
                let r1 = sys.assemble(&trial, eps, false);
                let s1: T = d.iter().zip(&r1).map(|(a, b)| *a * *b).sum();
                if s1 <= (lit::<T>(2.0 * ARMIJO) - T::one()) * slope {
                    energy = e1;
                    accepted = true;
                    break;
                }
            }
            alpha = alpha * lit(0.5);
        }
        if !accepted {
            break;
        }
        std::mem::swap(&mut u, &mut trial);
        if sys.singular {
            subtract_mean(&mut u);
        }
        trace.push(energy);
    }
    if !converged {
        return Err(SolverError::NoConvergence { iterations, residual: residual.to_f64_lossy() });
    }
    let mut shift = T::zero();
    if sys.singular {
        shift = -median(&element_values(mesh, &u));
        u.iter_mut().for_each(|x| *x += shift);
    }
    let gradient = GradientField::of(mesh, &u);
    Ok(Solution { u, gradient, iterations, energy, residual, energy_trace: trace, shift })
}

/// `J(u)` for an arbitrary nodal vector.
pub fn energy<T: Real>(problem: &ProblemSpec<T>, f_h: &DiscreteField<T>, u: &[T]) -> T {
    let mesh = &*problem.mesh;
    let sys = System::new(mesh, &problem.operator, problem.bc, nodal_loads(mesh, f_h));
    sys.energy(u)
}
