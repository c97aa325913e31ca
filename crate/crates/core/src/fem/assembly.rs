//! Operators of the weak forms. Convection uses the skew-symmetrized forms
//!
//!   b(a, v, w) = (a·∇v, w) + ½((∇·a) v, w)
//!   b̂(a, s, t) = (a·∇s, t) + ½((∇·a) s, t)
//!
//! so that b(a, v, v) = b̂(a, s, s) = 0 for every advecting field `a`.

use super::basis::P2_NODES;
use super::space::{push_local, push_local_offset};
use super::{FeSpace, Space};
use crate::sparse::{CsrMatrix, TripletBuilder};

impl FeSpace {
    /// `coeff·(∇u, ∇v)` on the chosen P2 space (both velocity components for
    /// `Space::Velocity`).
    pub fn assemble_diffusion(&self, space: Space, coeff: f64) -> CsrMatrix {
        let k = self.scalar_stiffness();
        match space {
            Space::Temperature => k.scaled(coeff),
            Space::Velocity => block_diagonal(k, coeff),
        }
    }

    /// Divergence operator `B[i,j] = −(∇·φ_j, ψ_i)`.
    pub fn assemble_divergence(&self) -> CsrMatrix {
        self.divergence().clone()
    }

    /// Scalar skew convection matrix `N[i,j] = b̂(a, φ_j, φ_i)`.
    fn scalar_convection(&self, a: &[f64]) -> CsrMatrix {
        let n = self.dofs().n_scalar();
        self.assemble_by_element(n, n, |t, pts, out| {
            let nodes = self.dofs().element_nodes(t);
            let mut m = [[0.0; P2_NODES]; P2_NODES];
            for q in pts {
                let (av, ag) = self.eval_velocity(a, t, q);
                let half_div = 0.5 * (ag[0][0] + ag[1][1]);
                for j in 0..P2_NODES {
                    let transport = av[0] * q.dphi[j][0] + av[1] * q.dphi[j][1] + half_div * q.phi[j];
                    let wj = q.weight * transport;
                    for i in 0..P2_NODES {
                        m[i][j] += wj * q.phi[i];
                    }
                }
            }
            push_local(out, nodes, nodes, &m);
        })
    }

    /// `N(a)[i,j] = b(a, φ_j, φ_i)` for velocity, `b̂(a, φ_j, φ_i)` for
    /// temperature.
    pub fn assemble_skew_convection(&self, a: &[f64], target: Space) -> CsrMatrix {
        assert_eq!(a.len(), self.dofs().n_velocity(), "advecting field must be a velocity");
        let n = self.scalar_convection(a);
        match target {
            Space::Temperature => n,
            Space::Velocity => block_diagonal(&n, 1.0),
        }
    }

    /// Newton reaction terms, linear in the trial velocity:
    /// `R_u[i,j] = b(φ_j, u_lin, φ_i)` (velocity × velocity) and
    /// `R_T[i,j] = b̂(φ_j, T_lin, φ_i)` (temperature rows × velocity columns).
    pub fn assemble_newton_reaction(&self, u_lin: &[f64], t_lin: &[f64]) -> (CsrMatrix, CsrMatrix) {
        let n = self.dofs().n_scalar();
        assert_eq!(u_lin.len(), 2 * n);
        assert_eq!(t_lin.len(), n);
        let r_u = self.assemble_by_element(2 * n, 2 * n, |t, pts, out| {
            let nodes = self.dofs().element_nodes(t);
            // blocks[d][c]: test component d, trial component c
            let mut blocks = [[[[0.0; P2_NODES]; P2_NODES]; 2]; 2];
            for q in pts {
                let (uv, ug) = self.eval_velocity(u_lin, t, q);
                for (d, row) in blocks.iter_mut().enumerate() {
                    for (c, m) in row.iter_mut().enumerate() {
                        for j in 0..P2_NODES {
                            let s = q.weight * (q.phi[j] * ug[d][c] + 0.5 * q.dphi[j][c] * uv[d]);
                            for i in 0..P2_NODES {
                                m[i][j] += s * q.phi[i];
                            }
                        }
                    }
                }
            }
            for (d, row) in blocks.iter().enumerate() {
                for (c, m) in row.iter().enumerate() {
                    push_local_offset(out, nodes, d * n, nodes, c * n, m);
                }
            }
        });
        let r_t = self.assemble_by_element(n, 2 * n, |t, pts, out| {
            let nodes = self.dofs().element_nodes(t);
            let mut blocks = [[[0.0; P2_NODES]; P2_NODES]; 2];
            for q in pts {
                let (tv, tg) = self.eval_scalar(t_lin, t, q);
                for (c, m) in blocks.iter_mut().enumerate() {
                    for j in 0..P2_NODES {
                        let s = q.weight * (q.phi[j] * tg[c] + 0.5 * q.dphi[j][c] * tv);
                        for i in 0..P2_NODES {
                            m[i][j] += s * q.phi[i];
                        }
                    }
                }
            }
            for (c, m) in blocks.iter().enumerate() {
                push_local_offset(out, nodes, 0, nodes, c * n, m);
            }
        });
        (r_u, r_t)
    }

    /// `C[i,j] = Ri·(ψ_j, φ_i·e₂)`: temperature columns forcing the second
    /// momentum component.
    pub fn assemble_buoyancy(&self, ri: f64) -> CsrMatrix {
        let n = self.dofs().n_scalar();
        let mut b = TripletBuilder::with_capacity(2 * n, n, self.scalar_mass().nnz());
        if ri != 0.0 {
            b.add_block(self.scalar_mass(), n, 0, ri);
        }
        b.build()
    }

    /// `(f, φ_i)` for both velocity components.
    pub fn load_velocity(&self, f: &(dyn Fn(f64, f64) -> [f64; 2] + Send + Sync)) -> Vec<f64> {
        let n = self.dofs().n_scalar();
        let mut rhs = vec![0.0; 2 * n];
        for t in 0..self.dofs().num_triangles() {
            let nodes = self.dofs().element_nodes(t);
            for q in self.points(t) {
                let fv = f(q.x[0], q.x[1]);
                for (k, &node) in nodes.iter().enumerate() {
                    rhs[node] += q.weight * fv[0] * q.phi[k];
                    rhs[n + node] += q.weight * fv[1] * q.phi[k];
                }
            }
        }
        rhs
    }

    /// `(g, φ_i)` for a scalar source.
    pub fn load_scalar(&self, g: &(dyn Fn(f64, f64) -> f64 + Send + Sync)) -> Vec<f64> {
        let mut rhs = vec![0.0; self.dofs().n_scalar()];
        for t in 0..self.dofs().num_triangles() {
            let nodes = self.dofs().element_nodes(t);
            for q in self.points(t) {
                let gv = g(q.x[0], q.x[1]);
                for (k, &node) in nodes.iter().enumerate() {
                    rhs[node] += q.weight * gv * q.phi[k];
                }
            }
        }
        rhs
    }
}

fn block_diagonal(m: &CsrMatrix, scale: f64) -> CsrMatrix {
    let n = m.nrows();
    let mut b = TripletBuilder::with_capacity(2 * n, 2 * n, 2 * m.nnz());
    b.add_block(m, 0, 0, scale);
    b.add_block(m, n, n, scale);
    b.build()
}
