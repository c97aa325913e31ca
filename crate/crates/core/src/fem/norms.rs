use super::quadrature::TriangleRule;
use super::space::tabulate;
use super::{FeSpace, FemError, State};

/// Discretization errors of a discrete state against exact fields.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FieldErrors {
    pub velocity_l2: f64,
    pub velocity_h1: f64,
    pub pressure_l2: f64,
    pub temperature_l2: f64,
    pub temperature_h1: f64,
}

/// Exact solution used for error measurement. Gradients are `[d][c] = ∂_c u_d`.
pub trait ExactSolution: Sync {
    fn velocity(&self, x: f64, y: f64) -> [f64; 2];
    fn velocity_gradient(&self, x: f64, y: f64) -> [[f64; 2]; 2];
    fn pressure(&self, x: f64, y: f64) -> f64;
    fn temperature(&self, x: f64, y: f64) -> f64;
    fn temperature_gradient(&self, x: f64, y: f64) -> [f64; 2];
}

impl FeSpace {
    fn quad_form(&self, v: &[f64]) -> f64 {
        self.scalar_stiffness().bilinear(v, v).max(0.0)
    }

    /// ‖∇u‖ for a velocity coefficient vector.
    pub fn grad_norm_velocity(&self, u: &[f64]) -> f64 {
        let n = self.dofs().n_scalar();
        (self.quad_form(&u[..n]) + self.quad_form(&u[n..])).sqrt()
    }

    /// ‖∇T‖ for a scalar coefficient vector.
    pub fn grad_norm_scalar(&self, t: &[f64]) -> f64 {
        self.quad_form(t).sqrt()
    }

    /// B inner product `ν(∇u₁,∇u₂) + κ(∇T₁,∇T₂)`.
    pub fn b_inner(&self, u1: &[f64], t1: &[f64], u2: &[f64], t2: &[f64], nu: f64, kappa: f64) -> f64 {
        let n = self.dofs().n_scalar();
        let k = self.scalar_stiffness();
        nu * (k.bilinear(&u1[..n], &u2[..n]) + k.bilinear(&u1[n..], &u2[n..]))
            + kappa * k.bilinear(t1, t2)
    }

    /// `√(ν‖∇(u₁−u₂)‖² + κ‖∇(T₁−T₂)‖²)`; pressure does not enter.
    pub fn b_norm_diff(&self, s1: &State, s2: &State, nu: f64, kappa: f64) -> Result<f64, FemError> {
        s1.check_dims(self.dofs())?;
        s2.check_dims(self.dofs())?;
        let du: Vec<f64> = s1.u.iter().zip(&s2.u).map(|(a, b)| a - b).collect();
        let dt: Vec<f64> = s1.t.iter().zip(&s2.t).map(|(a, b)| a - b).collect();
        let n = self.dofs().n_scalar();
        let sq = nu * (self.quad_form(&du[..n]) + self.quad_form(&du[n..])) + kappa * self.quad_form(&dt);
        Ok(sq.sqrt())
    }

    /// ‖∇·u_h‖ over the domain.
    pub fn divergence_norm(&self, u: &[f64]) -> f64 {
        let sq: f64 = (0..self.dofs().num_triangles())
            .map(|t| {
                self.points(t)
                    .iter()
                    .map(|q| {
                        let (_, g) = self.eval_velocity(u, t, q);
                        let div = g[0][0] + g[1][1];
                        q.weight * div * div
                    })
                    .sum::<f64>()
            })
            .sum();
        sq.sqrt()
    }

    /// L² / H¹-seminorm errors measured with a high-order rule.
    pub fn errors_against(&self, state: &State, exact: &dyn ExactSolution) -> FieldErrors {
        let rule = TriangleRule::collapsed_gauss(6);
        let dofs = self.dofs();
        let mut acc = [0.0f64; 5];
        for t in 0..dofs.num_triangles() {
            for q in tabulate(dofs, &rule, t) {
                let [x, y] = q.x;
                let (uh, guh) = self.eval_velocity(&state.u, t, &q);
                let (th, gth) = self.eval_scalar(&state.t, t, &q);
                let ph: f64 = (0..3).map(|k| state.p[3 * t + k] * q.lambda[k]).sum();
                let u = exact.velocity(x, y);
                let gu = exact.velocity_gradient(x, y);
                let tv = exact.temperature(x, y);
                let gt = exact.temperature_gradient(x, y);
                let w = q.weight;
                acc[0] += w * ((uh[0] - u[0]).powi(2) + (uh[1] - u[1]).powi(2));
                acc[1] += w * (0..2)
                    .flat_map(|d| (0..2).map(move |c| (d, c)))
                    .map(|(d, c)| (guh[d][c] - gu[d][c]).powi(2))
                    .sum::<f64>();
                acc[2] += w * (ph - exact.pressure(x, y)).powi(2);
                acc[3] += w * (th - tv).powi(2);
                acc[4] += w * ((gth[0] - gt[0]).powi(2) + (gth[1] - gt[1]).powi(2));
            }
        }
        let [a, b, c, d, e] = acc.map(f64::sqrt);
        FieldErrors {
            velocity_l2: a,
            velocity_h1: b,
            pressure_l2: c,
            temperature_l2: d,
            temperature_h1: e,
        }
    }
}
