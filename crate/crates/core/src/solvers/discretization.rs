use std::sync::Arc;

use thiserror::Error;

use crate::fem::{apply_constraints, Constraints, FeSpace, ProblemData, Space, State};
use crate::linsolve::{solve_direct, AndersonHistory, InnerProduct, LinearSystem, SolveError};
use crate::sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Error)]
#[error("{stage} solve failed: {source}")]
pub struct StepError {
    pub stage: &'static str,
    #[source]
    pub source: SolveError,
}

fn stage(stage: &'static str) -> impl FnOnce(SolveError) -> StepError {
    move |source| StepError { stage, source }
}

/// A finite element space paired with problem data, with every operator that
/// does not depend on the iterate assembled once.
pub struct Discretization {
    space: Arc<FeSpace>,
    data: ProblemData,
    viscous: CsrMatrix,
    conductive: CsrMatrix,
    div: CsrMatrix,
    grad: CsrMatrix,
    buoyancy: CsrMatrix,
    force: Vec<f64>,
    heat: Vec<f64>,
}

impl Discretization {
    pub fn new(space: Arc<FeSpace>, data: ProblemData) -> Self {
        let n = space.dofs().n_scalar();
        let viscous = space.assemble_diffusion(Space::Velocity, data.nu);
        let conductive = space.assemble_diffusion(Space::Temperature, data.kappa);
        let div = space.assemble_divergence();
        let grad = div.transpose();
        let buoyancy = space.assemble_buoyancy(data.ri);
        let force = match &data.force {
            Some(f) => space.load_velocity(f.as_ref()),
            None => vec![0.0; 2 * n],
        };
        let heat = match &data.heat_source {
            Some(g) => space.load_scalar(g.as_ref()),
            None => vec![0.0; n],
        };
        Self {
            space,
            data,
            viscous,
            conductive,
            div,
            grad,
            buoyancy,
            force,
            heat,
        }
    }

    /// Same space and boundary data with a different Richardson number.
    pub fn with_ri(&self, ri: f64) -> Self {
        let mut d = Self {
            space: self.space.clone(),
            data: self.data.with_ri(ri),
            viscous: self.viscous.clone(),
            conductive: self.conductive.clone(),
            div: self.div.clone(),
            grad: self.grad.clone(),
            buoyancy: CsrMatrix::zeros(0, 0),
            force: self.force.clone(),
            heat: self.heat.clone(),
        };
        d.buoyancy = d.space.assemble_buoyancy(ri);
        d
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn data(&self) -> &ProblemData {
        &self.data
    }

    /// Zero initial guess with temperature boundary values applied.
    pub fn initial_state(&self) -> State {
        State::lifted(self.space.dofs())
    }

    fn n(&self) -> usize {
        self.space.dofs().n_scalar()
    }

    fn np(&self) -> usize {
        self.space.dofs().n_pressure()
    }

    /// Temperature half of the Picard step: κ-diffusion plus b̂(u, ·, ·).
    pub fn picard_temperature(&self, u: &[f64]) -> Result<Vec<f64>, StepError> {
        let dofs = self.space.dofs();
        let a = self
            .conductive
            .add_scaled(1.0, &self.space.assemble_skew_convection(u, Space::Temperature));
        let sys = apply_constraints(
            LinearSystem::new(a, self.heat.clone()),
            &Constraints::new().fix(dofs.temperature_dirichlet_dofs(), 0),
        );
        solve_direct(&sys).map_err(stage("temperature"))
    }

    /// Oseen half of the Picard step: velocity and pressure advected by `u`
    /// and forced by the buoyancy of `t`.
    pub fn picard_flow(&self, u: &[f64], t: &[f64]) -> Result<(Vec<f64>, Vec<f64>), StepError> {
        let n = self.n();
        let np = self.np();
        let dofs = self.space.dofs();
        let conv = self.space.assemble_skew_convection(u, Space::Velocity);
        let mut b = TripletBuilder::with_capacity(
            2 * n + np,
            2 * n + np,
            self.viscous.nnz() + conv.nnz() + 2 * self.div.nnz(),
        );
        b.add_block(&self.viscous, 0, 0, 1.0);
        b.add_block(&conv, 0, 0, 1.0);
        b.add_block(&self.grad, 0, 2 * n, 1.0);
        b.add_block(&self.div, 2 * n, 0, 1.0);
        let mut rhs = self.force.clone();
        self.buoyancy.mul_vec_add(1.0, t, &mut rhs);
        rhs.resize(2 * n + np, 0.0);
        let sys = apply_constraints(
            LinearSystem::new(b.build(), rhs),
            &Constraints::new()
                .fix(dofs.velocity_dirichlet_dofs().map(|d| (d, 0.0)), 0)
                .zero_mean(2 * n, self.space.pressure_weights()),
        );
        let x = solve_direct(&sys).map_err(stage("oseen"))?;
        Ok((x[..2 * n].to_vec(), x[2 * n..2 * n + np].to_vec()))
    }

    /// One Picard step: the temperature is solved first with the lagged
    /// velocity, then the Oseen problem with the new temperature's buoyancy.
    pub fn picard_step(&self, x: &State) -> Result<State, StepError> {
        let t = self.picard_temperature(&x.u)?;
        let (u, p) = self.picard_flow(&x.u, &t)?;
        Ok(State { u, p, t })
    }

    /// One Newton step linearized at `x_lin`, solving the fully coupled
    /// (u, p, T) system.
    pub fn newton_step(&self, x_lin: &State) -> Result<State, StepError> {
        let n = self.n();
        let np = self.np();
        let dofs = self.space.dofs();
        let (ul, tl) = (&x_lin.u, &x_lin.t);
        let conv_u = self.space.assemble_skew_convection(ul, Space::Velocity);
        let conv_t = self.space.assemble_skew_convection(ul, Space::Temperature);
        let (react_u, react_t) = self.space.assemble_newton_reaction(ul, tl);
        let size = 3 * n + np;
        let t_off = 2 * n + np;
        let mut b = TripletBuilder::with_capacity(
            size,
            size,
            self.viscous.nnz()
                + conv_u.nnz()
                + react_u.nnz()
                + 2 * self.div.nnz()
                + self.buoyancy.nnz()
                + react_t.nnz()
                + self.conductive.nnz()
                + conv_t.nnz(),
        );
        b.add_block(&self.viscous, 0, 0, 1.0);
        b.add_block(&conv_u, 0, 0, 1.0);
        b.add_block(&react_u, 0, 0, 1.0);
        b.add_block(&self.grad, 0, 2 * n, 1.0);
        b.add_block(&self.buoyancy, 0, t_off, -1.0);
        b.add_block(&self.div, 2 * n, 0, 1.0);
        b.add_block(&react_t, t_off, 0, 1.0);
        b.add_block(&self.conductive, t_off, t_off, 1.0);
        b.add_block(&conv_t, t_off, t_off, 1.0);

        let mut rhs = vec![0.0; size];
        rhs[..2 * n].copy_from_slice(&self.force);
        conv_u.mul_vec_add(1.0, ul, &mut rhs[..2 * n]);
        rhs[t_off..].copy_from_slice(&self.heat);
        conv_t.mul_vec_add(1.0, tl, &mut rhs[t_off..]);

        let sys = apply_constraints(
            LinearSystem::new(b.build(), rhs),
            &Constraints::new()
                .fix(dofs.velocity_dirichlet_dofs().map(|d| (d, 0.0)), 0)
                .fix(dofs.temperature_dirichlet_dofs(), t_off)
                .zero_mean(2 * n, self.space.pressure_weights()),
        );
        let x = solve_direct(&sys).map_err(stage("newton"))?;
        Ok(State {
            u: x[..2 * n].to_vec(),
            p: x[2 * n..t_off].to_vec(),
            t: x[t_off..size].to_vec(),
        })
    }

    /// Newton linearized at the Picard image of `x`.
    pub fn picard_newton_step(&self, x: &State) -> Result<State, StepError> {
        let xp = self.picard_step(x)?;
        self.newton_step(&xp)
    }

    /// Picard step, Anderson mixing of (u, T) over the stored outer iterates,
    /// then a Newton step linearized at the mixed state. The history
    /// accumulates across calls.
    pub fn aa_picard_newton_step(
        &self,
        x: &State,
        hist: &mut AndersonHistory,
    ) -> Result<State, StepError> {
        let xp = self.picard_step(x)?;
        hist.push(self.pack(x), self.pack(&xp));
        let (mixed, coeffs) = crate::linsolve::anderson_mix(hist, &self.b_inner());
        if let Some(c) = &coeffs {
            debug_assert!(c.objective <= c.newest_norm * (1.0 + 1e-12));
        }
        let xt = match coeffs {
            // No mixing took place: `mixed` is the Picard image itself.
            None => xp,
            Some(_) => {
                let (u, t) = self.unpack(&mixed);
                State { u, p: xp.p, t }
            }
        };
        self.newton_step(&xt)
    }

    /// (u, T) concatenation used for Anderson mixing; pressure is left out.
    pub fn pack(&self, s: &State) -> Vec<f64> {
        let mut v = Vec::with_capacity(s.u.len() + s.t.len());
        v.extend_from_slice(&s.u);
        v.extend_from_slice(&s.t);
        v
    }

    fn unpack(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let nu = 2 * self.n();
        (v[..nu].to_vec(), v[nu..].to_vec())
    }

    /// The B inner product on packed (u, T) vectors.
    pub fn b_inner(&self) -> BInner<'_> {
        BInner {
            space: &self.space,
            nu: self.data.nu,
            kappa: self.data.kappa,
        }
    }

    pub fn b_norm_diff(&self, a: &State, b: &State) -> f64 {
        self.space
            .b_norm_diff(a, b, self.data.nu, self.data.kappa)
            .expect("states built on this discretization")
    }
}

/// `ν(∇u₁,∇u₂) + κ(∇T₁,∇T₂)` on packed (u, T) vectors.
pub struct BInner<'a> {
    space: &'a FeSpace,
    nu: f64,
    kappa: f64,
}

impl InnerProduct for BInner<'_> {
    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let nu = 2 * self.space.dofs().n_scalar();
        self.space
            .b_inner(&a[..nu], &a[nu..], &b[..nu], &b[nu..], self.nu, self.kappa)
    }
}
