//! P1 finite elements for `−div(a(x)·b(|∇u|)∇u/|∇u|) = f` with Dirichlet or
//! Neumann conditions, solved by damped Newton on the convex energy.
//!
//! [`run_schedule`] mollifies an L¹ or measure datum at a sequence of scales
//! and solves each approximating problem; [`radial_oracle`] gives the exact
//! radial profiles used to validate the discretization.

mod datum;
mod error;
mod mesh;
mod newton;
mod operator;
mod problem;
mod radial;
mod schedule;
pub mod snapshot;
mod sparse;

pub use datum::{element_averages, mollify_datum, Datum, DensityFn, Mollifier, PointMass};
pub use error::SolverError;
pub use mesh::{build_mesh, build_mesh_graded, Geometry, Mesh};
pub use newton::{element_values, energy, nodal_loads, solve_weak, GradientField, Solution, SolveOptions};
pub use operator::{OperatorField, Weight};
pub use problem::{check_compatible, BoundaryCondition, ProblemSpec};
pub use radial::{radial_oracle, RadialDatum, RadialProfile};
pub use schedule::{cauchy_table, default_taus, gradient_integral, run_schedule, ApproximationRun, CauchyTable, StepRecord};
pub use sparse::{pcg, CgStats, CsrMatrix, IncompleteCholesky};

pub type Mesh64 = Mesh<f64>;
pub type Problem = ProblemSpec<f64>;
pub type Run = ApproximationRun<f64>;
pub type Profile = RadialProfile<f64>;
