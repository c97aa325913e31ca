use std::sync::Arc;

use rayon::prelude::*;

use super::basis::{barycentric_gradients, p2_gradients, p2_values, P2_NODES};
use super::quadrature::TriangleRule;
use super::DofMap;
use crate::sparse::{CsrMatrix, TripletBuilder};

const CHUNK: usize = 256;

/// Basis data at one physical quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    /// Reference weight scaled by the Jacobian.
    pub weight: f64,
    pub x: [f64; 2],
    pub lambda: [f64; 3],
    pub phi: [f64; P2_NODES],
    pub dphi: [[f64; 2]; P2_NODES],
}

/// A dof map together with tabulated basis functions and the operators that
/// do not depend on the iterate (stiffness, mass, divergence).
#[derive(Debug, Clone)]
pub struct FeSpace {
    dofs: Arc<DofMap>,
    rule: TriangleRule,
    nq: usize,
    quad: Vec<QuadPoint>,
    stiffness: CsrMatrix,
    mass: CsrMatrix,
    divergence: CsrMatrix,
    pressure_weights: Vec<f64>,
}

pub(crate) fn tabulate(dofs: &DofMap, rule: &TriangleRule, t: usize) -> Vec<QuadPoint> {
    let mesh = dofs.mesh();
    let p = mesh.triangles[t].map(|v| mesh.vertices[v]);
    let (area, grad_l) = barycentric_gradients(p);
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(&l, &w)| QuadPoint {
            weight: 2.0 * area * w,
            x: [
                l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
                l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
            ],
            lambda: l,
            phi: p2_values(l),
            dphi: p2_gradients(l, &grad_l),
        })
        .collect()
}

impl FeSpace {
    pub fn new(dofs: Arc<DofMap>) -> Self {
        Self::with_rule(dofs, TriangleRule::degree5())
    }

    pub fn with_rule(dofs: Arc<DofMap>, rule: TriangleRule) -> Self {
        let nq = rule.len();
        let quad: Vec<QuadPoint> = (0..dofs.num_triangles())
            .into_par_iter()
            .flat_map_iter(|t| tabulate(&dofs, &rule, t))
            .collect();
        let mut space = Self {
            dofs,
            rule,
            nq,
            quad,
            stiffness: CsrMatrix::zeros(0, 0),
            mass: CsrMatrix::zeros(0, 0),
            divergence: CsrMatrix::zeros(0, 0),
            pressure_weights: Vec::new(),
        };
        space.stiffness = space.build_scalar_stiffness();
        space.mass = space.build_scalar_mass();
        space.divergence = space.build_divergence();
        space.pressure_weights = (0..space.dofs.num_triangles())
            .flat_map(|t| {
                let area: f64 = space.points(t).iter().map(|q| q.weight).sum();
                [area / 3.0; 3]
            })
            .collect();
        space
    }

    pub fn dofs(&self) -> &Arc<DofMap> {
        &self.dofs
    }

    pub fn rule(&self) -> &TriangleRule {
        &self.rule
    }

    /// Quadrature data of triangle `t`.
    pub fn points(&self, t: usize) -> &[QuadPoint] {
        &self.quad[t * self.nq..(t + 1) * self.nq]
    }

    /// Scalar P2 stiffness (∇φ_j, ∇φ_i), no boundary conditions applied.
    pub fn scalar_stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// Scalar P2 mass matrix (φ_j, φ_i).
    pub fn scalar_mass(&self) -> &CsrMatrix {
        &self.mass
    }

    /// B[i, j] = −(∇·φ_j, ψ_i): pressure rows, velocity columns.
    pub fn divergence(&self) -> &CsrMatrix {
        &self.divergence
    }

    /// ∫ψ_i for each pressure basis function.
    pub fn pressure_weights(&self) -> &[f64] {
        &self.pressure_weights
    }

    /// Runs `local` over every triangle and gathers its triplets. Chunks are
    /// fixed-size and concatenated in element order, so the result is
    /// independent of the thread count.
    pub(crate) fn assemble_by_element<F>(&self, nrows: usize, ncols: usize, local: F) -> CsrMatrix
    where
        F: Fn(usize, &[QuadPoint], &mut Vec<(usize, usize, f64)>) + Sync,
    {
        let nt = self.dofs.num_triangles();
        let chunks: Vec<Vec<(usize, usize, f64)>> = (0..nt.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut out = Vec::with_capacity(CHUNK * 36);
                for t in c * CHUNK..((c + 1) * CHUNK).min(nt) {
                    local(t, self.points(t), &mut out);
                }
                out
            })
            .collect();
        let mut b = TripletBuilder::with_capacity(nrows, ncols, chunks.iter().map(Vec::len).sum());
        for chunk in chunks {
            b.extend(chunk);
        }
        b.build()
    }

    fn build_scalar_stiffness(&self) -> CsrMatrix {
        let n = self.dofs.n_scalar();
        self.assemble_by_element(n, n, |t, pts, out| {
            let nodes = self.dofs.element_nodes(t);
            let mut k = [[0.0; P2_NODES]; P2_NODES];
            for q in pts {
                for i in 0..P2_NODES {
                    for j in 0..P2_NODES {
                        k[i][j] += q.weight * (q.dphi[i][0] * q.dphi[j][0] + q.dphi[i][1] * q.dphi[j][1]);
                    }
                }
            }
            push_local(out, nodes, nodes, &k);
        })
    }

    fn build_scalar_mass(&self) -> CsrMatrix {
        let n = self.dofs.n_scalar();
        self.assemble_by_element(n, n, |t, pts, out| {
            let nodes = self.dofs.element_nodes(t);
            let mut m = [[0.0; P2_NODES]; P2_NODES];
            for q in pts {
                for i in 0..P2_NODES {
                    for j in 0..P2_NODES {
                        m[i][j] += q.weight * q.phi[i] * q.phi[j];
                    }
                }
            }
            push_local(out, nodes, nodes, &m);
        })
    }

    fn build_divergence(&self) -> CsrMatrix {
        let n = self.dofs.n_scalar();
        self.assemble_by_element(self.dofs.n_pressure(), 2 * n, |t, pts, out| {
            let nodes = self.dofs.element_nodes(t);
            for k in 0..3 {
                for c in 0..2 {
                    for (j, &node) in nodes.iter().enumerate() {
                        let v: f64 = pts.iter().map(|q| -q.weight * q.dphi[j][c] * q.lambda[k]).sum();
                        out.push((3 * t + k, c * n + node, v));
                    }
                }
            }
        })
    }

    /// Nodal interpolant of a scalar function.
    pub fn interpolate_scalar(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.dofs.node_coords().iter().map(|&[x, y]| f(x, y)).collect()
    }

    /// Nodal interpolant of a vector function, component-major.
    pub fn interpolate_velocity(&self, f: impl Fn(f64, f64) -> [f64; 2]) -> Vec<f64> {
        let coords = self.dofs.node_coords();
        let n = coords.len();
        let mut u = vec![0.0; 2 * n];
        for (i, &[x, y]) in coords.iter().enumerate() {
            let v = f(x, y);
            u[i] = v[0];
            u[n + i] = v[1];
        }
        u
    }

    /// Value and gradient of a scalar P2 field at a quadrature point of `t`.
    #[inline]
    pub fn eval_scalar(&self, coef: &[f64], t: usize, q: &QuadPoint) -> (f64, [f64; 2]) {
        let nodes = self.dofs.element_nodes(t);
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for (k, &node) in nodes.iter().enumerate() {
            let c = coef[node];
            v += c * q.phi[k];
            g[0] += c * q.dphi[k][0];
            g[1] += c * q.dphi[k][1];
        }
        (v, g)
    }

    /// Value and gradient (`grad[d][c] = ∂_c u_d`) of a velocity field.
    #[inline]
    pub fn eval_velocity(&self, u: &[f64], t: usize, q: &QuadPoint) -> ([f64; 2], [[f64; 2]; 2]) {
        let n = self.dofs.n_scalar();
        let (ux, gx) = self.eval_scalar(&u[..n], t, q);
        let (uy, gy) = self.eval_scalar(&u[n..], t, q);
        ([ux, uy], [gx, gy])
    }
}

#[inline]
pub(crate) fn push_local(
    out: &mut Vec<(usize, usize, f64)>,
    rows: &[usize; 6],
    cols: &[usize; 6],
    m: &[[f64; P2_NODES]; P2_NODES],
) {
    push_local_offset(out, rows, 0, cols, 0, m);
}

#[inline]
pub(crate) fn push_local_offset(
    out: &mut Vec<(usize, usize, f64)>,
    rows: &[usize; 6],
    row_offset: usize,
    cols: &[usize; 6],
    col_offset: usize,
    m: &[[f64; P2_NODES]; P2_NODES],
) {
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            out.push((row_offset + r, col_offset + c, m[i][j]));
        }
    }
}
