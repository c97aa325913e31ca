//! Nonlinear iterations for the steady Boussinesq system: Picard, Newton,
//! Picard-Newton and Anderson-accelerated Picard-Newton.
//!
//! Every method starts from the zero state lifted to the temperature
//! boundary data and stops on the B-norm difference of successive iterates.

mod discretization;
mod order;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::fem::State;
use crate::linsolve::AndersonHistory;

pub use discretization::{BInner, Discretization, StepError};
pub use order::{estimate_order, OrderEstimate};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const DEFAULT_BLOWUP: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Picard,
    Newton,
    PicardNewton,
    AaPicardNewton,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Picard,
        Method::Newton,
        Method::PicardNewton,
        Method::AaPicardNewton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Picard => "picard",
            Method::Newton => "newton",
            Method::PicardNewton => "picard-newton",
            Method::AaPicardNewton => "aa-picard-newton",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method '{s}', expected one of: {}", valid.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Running,
    Converged,
    MaxIters,
    Diverged,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::Converged => "converged",
            Status::MaxIters => "max-iters",
            Status::Diverged => "diverged",
        }
    }

    pub fn is_terminal(self) -> bool {
        self != Status::Running
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Status::Running, Status::Converged, Status::MaxIters, Status::Diverged]
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown status '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Anderson depth; ignored by the other methods.
    pub depth: usize,
    pub tolerance: f64,
    pub max_iters: usize,
    pub blowup: f64,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            depth: 0,
            tolerance: DEFAULT_TOLERANCE,
            max_iters: DEFAULT_MAX_ITERS,
            blowup: DEFAULT_BLOWUP,
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.max_iters == 0 {
            return Err("max_iters must be at least 1".into());
        }
        if !(self.blowup > 0.0) {
            return Err(format!("blowup threshold must be positive, got {}", self.blowup));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// B-norm of the difference to the previous iterate.
    pub residual: f64,
    pub grad_u: f64,
    pub grad_t: f64,
    pub wall_ms: f64,
    pub status: Status,
    /// Set when a linear solve failed; the record is then `diverged`.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationHistory {
    pub records: Vec<IterationRecord>,
}

impl IterationHistory {
    pub fn status(&self) -> Status {
        self.records.last().map_or(Status::Running, |r| r.status)
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residual).collect()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.records.last().map(|r| r.residual)
    }

    /// Records with wall time zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Vec<IterationRecord> {
        self.records
            .iter()
            .map(|r| IterationRecord { wall_ms: 0.0, ..r.clone() })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub history: IterationHistory,
    /// Last successfully computed iterate.
    pub state: State,
}

impl SolveOutcome {
    pub fn status(&self) -> Status {
        self.history.status()
    }
}

/// A stepping rule plus the state it carries between outer iterations.
pub struct Stepper<'a> {
    disc: &'a Discretization,
    method: Method,
    history: AndersonHistory,
}

impl<'a> Stepper<'a> {
    pub fn new(disc: &'a Discretization, method: Method, depth: usize) -> Self {
        Self {
            disc,
            method,
            history: AndersonHistory::new(depth),
        }
    }

    pub fn step(&mut self, x: &State) -> Result<State, StepError> {
        match self.method {
            Method::Picard => self.disc.picard_step(x),
            Method::Newton => self.disc.newton_step(x),
            Method::PicardNewton => self.disc.picard_newton_step(x),
            Method::AaPicardNewton => self.disc.aa_picard_newton_step(x, &mut self.history),
        }
    }
}

/// Runs the configured method from the lifted zero state.
pub fn iterate(disc: &Discretization, config: &SolverConfig) -> SolveOutcome {
    iterate_from(disc, config, disc.initial_state())
}

/// Runs the configured method from `x0`.
pub fn iterate_from(disc: &Discretization, config: &SolverConfig, x0: State) -> SolveOutcome {
    let space = disc.space();
    let mut stepper = Stepper::new(disc, config.method, config.depth);
    let mut x = x0;
    let mut records = Vec::new();
    for k in 1..=config.max_iters {
        let start = Instant::now();
        let step = stepper.step(&x);
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let next = match step {
            Ok(next) => next,
            Err(e) => {
                records.push(IterationRecord {
                    iteration: k,
                    residual: f64::NAN,
                    grad_u: f64::NAN,
                    grad_t: f64::NAN,
                    wall_ms,
                    status: Status::Diverged,
                    failure: Some(e.to_string()),
                });
                break;
            }
        };
        let residual = disc.b_norm_diff(&next, &x);
        let grad_u = space.grad_norm_velocity(&next.u);
        let grad_t = space.grad_norm_scalar(&next.t);
        let status = if !residual.is_finite()
            || !grad_u.is_finite()
            || !next.is_finite()
            || residual > config.blowup
            || grad_u > config.blowup
        {
            Status::Diverged
        } else if residual < config.tolerance {
            Status::Converged
        } else if k == config.max_iters {
            Status::MaxIters
        } else {
            Status::Running
        };
        records.push(IterationRecord {
            iteration: k,
            residual,
            grad_u,
            grad_t,
            wall_ms,
            status,
            failure: None,
        });
        x = next;
        if status.is_terminal() {
            break;
        }
    }
    SolveOutcome {
        history: IterationHistory { records },
        state: x,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::fem::{DofMap, FeSpace, ProblemData, TemperatureBc};
    use crate::mesh::{barycentric_refine, generate_unit_square_mesh, TAG_BOTTOM, TAG_LEFT, TAG_RIGHT, TAG_TOP};

    fn cavity(n: usize, ri: f64) -> Discretization {
        let mesh = Arc::new(barycentric_refine(&generate_unit_square_mesh(n).unwrap()));
        let bcs = BTreeMap::from([
            (TAG_BOTTOM, TemperatureBc::Neumann),
            (TAG_RIGHT, TemperatureBc::dirichlet(|_, _| 1.0)),
            (TAG_TOP, TemperatureBc::Neumann),
            (TAG_LEFT, TemperatureBc::dirichlet(|_, _| 0.0)),
        ]);
        let dofs = Arc::new(DofMap::new(mesh, &bcs).unwrap());
        let data = ProblemData::new(0.1, 0.1, ri, bcs).unwrap();
        Discretization::new(Arc::new(FeSpace::new(dofs)), data)
    }

    fn zero_problem(n: usize) -> Discretization {
        let mesh = Arc::new(barycentric_refine(&generate_unit_square_mesh(n).unwrap()));
        let bcs: BTreeMap<_, _> = (1..=4).map(|t| (t, TemperatureBc::dirichlet(|_, _| 0.0))).collect();
        let dofs = Arc::new(DofMap::new(mesh, &bcs).unwrap());
        let data = ProblemData::new(0.1, 0.1, 0.0, bcs).unwrap();
        Discretization::new(Arc::new(FeSpace::new(dofs)), data)
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        let err = "nwton".parse::<Method>().unwrap_err();
        assert!(err.contains("picard-newton"));
    }

    #[test]
    fn zero_data_gives_zero_state_for_every_method() {
        let d = zero_problem(2);
        let mut x = d.initial_state();
        x.u.iter_mut().enumerate().for_each(|(i, v)| *v = (i as f64).sin());
        for m in Method::ALL {
            let out = Stepper::new(&d, m, 2).step(&d.initial_state()).unwrap();
            assert!(out.u.iter().chain(&out.p).chain(&out.t).all(|v| v.abs() < 1e-14), "{m}");
            let h = iterate(&d, &SolverConfig::new(m).with_depth(1));
            assert_eq!(h.status(), Status::Converged);
            assert_eq!(h.history.iterations(), 1);
        }
        // Picard from a nonzero start lands on zero in one step.
        let out = d.picard_step(&x).unwrap();
        assert!(out.u.iter().chain(&out.t).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn pure_conduction_limit() {
        // Ri = 0: no flow, T = x.
        let d = cavity(3, 0.0);
        let out = iterate(&d, &SolverConfig::new(Method::Picard));
        assert_eq!(out.status(), Status::Converged);
        assert!(out.state.u.iter().all(|v| v.abs() < 1e-12));
        let coords = d.space().dofs().node_coords();
        for (t, c) in out.state.t.iter().zip(coords) {
            assert!((t - c[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn temperature_stage_ignores_buoyancy() {
        let d = cavity(3, 5.0);
        let d0 = d.with_ri(0.0);
        let mut x = d.initial_state();
        x.u = d.space().interpolate_velocity(|x, y| {
            let s = (x * (1.0 - x) * y * (1.0 - y)).powi(2);
            [s, -s]
        });
        assert_eq!(d.picard_step(&x).unwrap().t, d0.picard_step(&x).unwrap().t);
    }

    #[test]
    fn newton_is_consistent_at_its_fixed_point() {
        let d = cavity(3, 10.0);
        let out = iterate(&d, &SolverConfig::new(Method::Newton).with_tolerance(1e-12));
        assert_eq!(out.status(), Status::Converged);
        for m in Method::ALL {
            let next = Stepper::new(&d, m, 1).step(&out.state).unwrap();
            assert!(d.b_norm_diff(&next, &out.state) < 1e-10, "{m}");
        }
        assert!(d.space().divergence_norm(&out.state.u) < 1e-10);
    }

    #[test]
    fn iterate_is_deterministic() {
        let d = cavity(2, 20.0);
        let c = SolverConfig::new(Method::AaPicardNewton).with_depth(2);
        let a = iterate(&d, &c);
        let b = iterate(&d, &c);
        assert_eq!(a.history.without_timing(), b.history.without_timing());
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn hitting_the_cap_reports_max_iters() {
        let d = cavity(2, 20.0);
        let out = iterate(&d, &SolverConfig::new(Method::Picard).with_max_iters(2).with_tolerance(1e-300));
        assert_eq!(out.history.iterations(), 2);
        assert_eq!(out.status(), Status::MaxIters);
        assert_eq!(out.history.records[0].status, Status::Running);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(Method::Picard).validate().is_ok());
        assert!(SolverConfig::new(Method::Picard).with_tolerance(0.0).validate().is_err());
        assert!(SolverConfig::new(Method::Picard).with_max_iters(0).validate().is_err());
    }
}
