//! Scott-Vogelius discretization of the steady Boussinesq system: P2
//! velocity, discontinuous P1 pressure and P2 temperature on barycentric
//! refined meshes.

mod assembly;
pub mod basis;
mod constraints;
mod dofmap;
mod norms;
pub mod quadrature;
mod space;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use constraints::{apply_constraints, Constraints, MeanConstraint};
pub use dofmap::{CornerConflict, DofMap};
pub use norms::{ExactSolution, FieldErrors};
pub use space::{FeSpace, QuadPoint};

pub type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("boundary tag {0} has no temperature condition")]
    MissingBoundaryCondition(i32),
    #[error("invalid problem data: {0}")]
    InvalidData(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Which P2 field an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Velocity,
    Temperature,
}

#[derive(Clone)]
pub enum TemperatureBc {
    Dirichlet(ScalarFn),
    /// Zero flux, ∇T·n = 0.
    Neumann,
}

impl TemperatureBc {
    pub fn dirichlet(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Dirichlet(Arc::new(f))
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, Self::Dirichlet(_))
    }
}

impl fmt::Debug for TemperatureBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dirichlet(_) => f.write_str("Dirichlet(..)"),
            Self::Neumann => f.write_str("Neumann"),
        }
    }
}

/// Coefficients, sources and temperature boundary data. Velocity is no-slip
/// on the whole boundary.
#[derive(Clone)]
pub struct ProblemData {
    pub nu: f64,
    pub kappa: f64,
    pub ri: f64,
    pub force: Option<VectorFn>,
    pub heat_source: Option<ScalarFn>,
    pub temperature_bcs: BTreeMap<i32, TemperatureBc>,
}

impl ProblemData {
    pub fn new(
        nu: f64,
        kappa: f64,
        ri: f64,
        temperature_bcs: BTreeMap<i32, TemperatureBc>,
    ) -> Result<Self, FemError> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(FemError::InvalidData(format!("viscosity must be positive, got {nu}")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(FemError::InvalidData(format!("diffusivity must be positive, got {kappa}")));
        }
        if !(ri >= 0.0 && ri.is_finite()) {
            return Err(FemError::InvalidData(format!("Richardson number must be >= 0, got {ri}")));
        }
        Ok(Self {
            nu,
            kappa,
            ri,
            force: None,
            heat_source: None,
            temperature_bcs,
        })
    }

    pub fn with_force(mut self, f: impl Fn(f64, f64) -> [f64; 2] + Send + Sync + 'static) -> Self {
        self.force = Some(Arc::new(f));
        self
    }

    pub fn with_heat_source(mut self, g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.heat_source = Some(Arc::new(g));
        self
    }

    pub fn with_ri(&self, ri: f64) -> Self {
        Self { ri, ..self.clone() }
    }
}

impl fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemData")
            .field("nu", &self.nu)
            .field("kappa", &self.kappa)
            .field("ri", &self.ri)
            .field("force", &self.force.is_some())
            .field("heat_source", &self.heat_source.is_some())
            .field("temperature_bcs", &self.temperature_bcs)
            .finish()
    }
}

/// Coefficient vectors of an iterate (u, p, T).
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    /// Velocity, component-major: x components then y components.
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub t: Vec<f64>,
}

impl State {
    pub fn zeros(dofs: &DofMap) -> Self {
        Self {
            u: vec![0.0; dofs.n_velocity()],
            p: vec![0.0; dofs.n_pressure()],
            t: vec![0.0; dofs.n_temperature()],
        }
    }

    /// Zero state with the temperature Dirichlet values applied.
    pub fn lifted(dofs: &DofMap) -> Self {
        let mut s = Self::zeros(dofs);
        for (node, v) in dofs.temperature_dirichlet_dofs() {
            s.t[node] = v;
        }
        s
    }

    pub fn check_dims(&self, dofs: &DofMap) -> Result<(), FemError> {
        if self.u.len() != dofs.n_velocity()
            || self.p.len() != dofs.n_pressure()
            || self.t.len() != dofs.n_temperature()
        {
            return Err(FemError::DimensionMismatch(format!(
                "state ({}, {}, {}) vs dof map ({}, {}, {})",
                self.u.len(),
                self.p.len(),
                self.t.len(),
                dofs.n_velocity(),
                dofs.n_pressure(),
                dofs.n_temperature()
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.p).chain(&self.t).all(|v| v.is_finite())
    }
}
