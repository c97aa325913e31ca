use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::mesh::{EdgeTable, Mesh};

use super::{FemError, TemperatureBc};

/// Two Dirichlet edges with different tags prescribe different values at a
/// shared node. The lower tag wins.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerConflict {
    pub node: usize,
    pub kept_tag: i32,
    pub kept_value: f64,
    pub dropped_tag: i32,
    pub dropped_value: f64,
}

/// Global numbering of the P2 velocity, P2 temperature and discontinuous P1
/// pressure unknowns.
///
/// Scalar P2 nodes are the mesh vertices followed by one node per edge.
/// Velocity is stored component-major (`c * n_scalar + node`); pressure dof
/// `3 t + k` is the barycentric coordinate λ_k restricted to triangle `t`.
#[derive(Debug, Clone)]
pub struct DofMap {
    mesh: Arc<Mesh>,
    edges: EdgeTable,
    element_nodes: Vec<[usize; 6]>,
    node_coords: Vec<[f64; 2]>,
    boundary_node: Vec<bool>,
    temperature_dirichlet: Vec<Option<f64>>,
    corner_conflicts: Vec<CornerConflict>,
}

impl DofMap {
    pub fn new(
        mesh: Arc<Mesh>,
        temperature_bcs: &BTreeMap<i32, TemperatureBc>,
    ) -> Result<Self, FemError> {
        let edges = mesh.edge_table();
        let nv = mesh.num_vertices();
        let n_scalar = nv + edges.edges.len();

        let element_nodes: Vec<[usize; 6]> = mesh
            .triangles
            .iter()
            .zip(&edges.triangle_edges)
            .map(|(t, e)| [t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]])
            .collect();

        let mut node_coords = mesh.vertices.clone();
        node_coords.extend(edges.edges.iter().map(|e| {
            let [a, b] = e.vertices.map(|v| mesh.vertices[v]);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        }));

        let edge_lookup: HashMap<(usize, usize), usize> = edges
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.vertices[0], e.vertices[1]), i))
            .collect();
        let edge_nodes = |a: usize, b: usize| -> [usize; 3] {
            let key = if a < b { (a, b) } else { (b, a) };
            [a, b, nv + edge_lookup[&key]]
        };

        let mut boundary_node = vec![false; n_scalar];
        for be in &mesh.boundary_edges {
            for node in edge_nodes(be.vertices[0], be.vertices[1]) {
                boundary_node[node] = true;
            }
        }

        for be in &mesh.boundary_edges {
            if !temperature_bcs.contains_key(&be.tag) {
                return Err(FemError::MissingBoundaryCondition(be.tag));
            }
        }

        // Dirichlet edges in ascending tag order: the first value written wins.
        let mut owner: Vec<Option<(i32, f64)>> = vec![None; n_scalar];
        let mut corner_conflicts = Vec::new();
        for (&tag, bc) in temperature_bcs {
            let TemperatureBc::Dirichlet(value_fn) = bc else {
                continue;
            };
            for be in mesh.boundary_edges.iter().filter(|be| be.tag == tag) {
                for node in edge_nodes(be.vertices[0], be.vertices[1]) {
                    let [x, y] = node_coords[node];
                    let value = value_fn(x, y);
                    match owner[node] {
                        None => owner[node] = Some((tag, value)),
                        Some((kept_tag, kept_value)) => {
                            let scale = kept_value.abs().max(value.abs()).max(1.0);
                            if kept_tag != tag && (kept_value - value).abs() > 1e-14 * scale {
                                corner_conflicts.push(CornerConflict {
                                    node,
                                    kept_tag,
                                    kept_value,
                                    dropped_tag: tag,
                                    dropped_value: value,
                                });
                            }
                        }
                    }
                }
            }
        }
        let temperature_dirichlet = owner.into_iter().map(|o| o.map(|(_, v)| v)).collect();

        Ok(Self {
            mesh,
            edges,
            element_nodes,
            node_coords,
            boundary_node,
            temperature_dirichlet,
            corner_conflicts,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn edges(&self) -> &EdgeTable {
        &self.edges
    }

    pub fn num_triangles(&self) -> usize {
        self.element_nodes.len()
    }

    /// Number of scalar P2 nodes (vertices + edges).
    pub fn n_scalar(&self) -> usize {
        self.node_coords.len()
    }

    pub fn n_velocity(&self) -> usize {
        2 * self.n_scalar()
    }

    pub fn n_pressure(&self) -> usize {
        3 * self.num_triangles()
    }

    pub fn n_temperature(&self) -> usize {
        self.n_scalar()
    }

    pub fn element_nodes(&self, t: usize) -> &[usize; 6] {
        &self.element_nodes[t]
    }

    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.node_coords
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        self.boundary_node[node]
    }

    /// Velocity dofs fixed by the no-slip condition (value 0).
    pub fn velocity_dirichlet_dofs(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n_scalar();
        (0..2).flat_map(move |c| {
            (0..n)
                .filter(move |&i| self.boundary_node[i])
                .map(move |i| c * n + i)
        })
    }

    /// Temperature nodes on Γ₁ with their prescribed values.
    pub fn temperature_dirichlet_dofs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.temperature_dirichlet
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
    }

    pub fn temperature_dirichlet_value(&self, node: usize) -> Option<f64> {
        self.temperature_dirichlet[node]
    }

    pub fn corner_conflicts(&self) -> &[CornerConflict] {
        &self.corner_conflicts
    }
}
