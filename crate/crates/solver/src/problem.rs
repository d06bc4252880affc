use std::sync::Arc;

use numeric::{lit, Real};
use orlicz::SobolevParams;

use crate::datum::{Datum, Mollifier};
use crate::error::SolverError;
use crate::mesh::Mesh;
use crate::operator::OperatorField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// A complete boundary-value problem on a fixed mesh.
#[derive(Debug, Clone)]
pub struct ProblemSpec<T: Real> {
    pub mesh: Arc<Mesh<T>>,
    pub operator: OperatorField<T>,
    pub bc: BoundaryCondition,
    pub datum: Datum<T>,
    /// `None` in one dimension, where `σ = n = 1` is degenerate and every
    /// finite-energy solution is bounded.
    pub sobolev: Option<SobolevParams<T>>,
    pub mollifier: Mollifier,
}

impl<T: Real> ProblemSpec<T> {
    /// Validates point-mass locations and, for Neumann problems, the zero-mass condition.
    /// The isoperimetric exponent defaults to `σ = n`.
    pub fn new(
        mesh: Arc<Mesh<T>>,
        operator: OperatorField<T>,
        bc: BoundaryCondition,
        datum: Datum<T>,
    ) -> Result<Self, SolverError> {
        let sobolev = match mesh.dimension() {
            1 => None,
            n => Some(SobolevParams::lipschitz(n)?),
        };
        Self::with_sobolev(mesh, operator, bc, datum, sobolev)
    }

    pub fn with_sobolev(
        mesh: Arc<Mesh<T>>,
        operator: OperatorField<T>,
        bc: BoundaryCondition,
        datum: Datum<T>,
        sobolev: Option<SobolevParams<T>>,
    ) -> Result<Self, SolverError> {
        for m in &datum.masses {
            if !mesh.geometry().contains_strictly(m.at) {
                return Err(SolverError::PointMassOutside { x: m.at[0].to_f64_lossy(), y: m.at[1].to_f64_lossy() });
            }
        }
        if bc == BoundaryCondition::Neumann {
            check_compatible(&datum, &mesh)?;
        }
        Ok(ProblemSpec { mesh, operator, bc, datum, sobolev, mollifier: Mollifier::Exponential })
    }

    pub fn with_mollifier(mut self, shape: Mollifier) -> Self {
        self.mollifier = shape;
        self
    }

    pub fn with_datum(&self, datum: Datum<T>) -> Result<Self, SolverError> {
        let mut p = Self::with_sobolev(self.mesh.clone(), self.operator.clone(), self.bc, datum, self.sobolev)?;
        p.mollifier = self.mollifier;
        Ok(p)
    }
}

/// Zero total mass, required for Neumann data.
pub fn check_compatible<T: Real>(datum: &Datum<T>, mesh: &Mesh<T>) -> Result<(), SolverError> {
    let total = datum.total(mesh.geometry(), Some(mesh));
    let scale = datum.total_variation(mesh).max(T::min_positive_value());
    if total.abs() > lit::<T>(1e-10) * scale {
        return Err(SolverError::IncompatibleNeumannData { total: total.to_f64_lossy() });
    }
    Ok(())
}
