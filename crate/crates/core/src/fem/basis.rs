//! Quadratic Lagrange basis on a triangle in barycentric form.
//!
//! Local node order: vertices 0, 1, 2, then midpoints of edges (0,1), (1,2),
//! (2,0). This matches the local edge order of [`crate::mesh::EdgeTable`].

pub const P2_NODES: usize = 6;

/// Local vertex pairs spanned by the edge nodes 3, 4, 5.
pub const EDGE_VERTICES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

/// Values of the six P2 basis functions at barycentric point `l`.
pub fn p2_values(l: [f64; 3]) -> [f64; P2_NODES] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

/// Physical gradients of the P2 basis given the (constant) barycentric
/// gradients of the element.
pub fn p2_gradients(l: [f64; 3], grad_l: &[[f64; 2]; 3]) -> [[f64; 2]; P2_NODES] {
    let mut g = [[0.0; 2]; P2_NODES];
    for i in 0..3 {
        let s = 4.0 * l[i] - 1.0;
        g[i] = [s * grad_l[i][0], s * grad_l[i][1]];
    }
    for (k, &[a, b]) in EDGE_VERTICES.iter().enumerate() {
        g[3 + k] = [
            4.0 * (l[b] * grad_l[a][0] + l[a] * grad_l[b][0]),
            4.0 * (l[b] * grad_l[a][1] + l[a] * grad_l[b][1]),
        ];
    }
    g
}

/// Signed area and barycentric gradients of the triangle (p0, p1, p2).
pub fn barycentric_gradients(p: [[f64; 2]; 3]) -> (f64, [[f64; 2]; 3]) {
    let area = crate::mesh::signed_area(p[0], p[1], p[2]);
    let inv = 1.0 / (2.0 * area);
    let g = [
        [(p[1][1] - p[2][1]) * inv, (p[2][0] - p[1][0]) * inv],
        [(p[2][1] - p[0][1]) * inv, (p[0][0] - p[2][0]) * inv],
        [(p[0][1] - p[1][1]) * inv, (p[1][0] - p[0][0]) * inv],
    ];
    (area, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NODES: [[f64; 3]; 6] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
    ];

    #[test]
    fn nodal_kronecker_property() {
        for (i, &node) in NODES.iter().enumerate() {
            let v = p2_values(node);
            for (j, &vj) in v.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((vj - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let p = [[0.2, 0.1], [1.3, 0.4], [0.5, 1.1]];
        let (area, gl) = barycentric_gradients(p);
        assert!(area > 0.0);
        let to_bary = |x: f64, y: f64| -> [f64; 3] {
            let l1 = gl[1][0] * (x - p[0][0]) + gl[1][1] * (y - p[0][1]);
            let l2 = gl[2][0] * (x - p[0][0]) + gl[2][1] * (y - p[0][1]);
            [1.0 - l1 - l2, l1, l2]
        };
        let (x, y, h) = (0.6, 0.5, 1e-6);
        let g = p2_gradients(to_bary(x, y), &gl);
        for k in 0..6 {
            let dx = (p2_values(to_bary(x + h, y))[k] - p2_values(to_bary(x - h, y))[k]) / (2.0 * h);
            let dy = (p2_values(to_bary(x, y + h))[k] - p2_values(to_bary(x, y - h))[k]) / (2.0 * h);
            assert!((g[k][0] - dx).abs() < 1e-8 && (g[k][1] - dy).abs() < 1e-8);
        }
    }

    #[test]
    fn partition_of_unity() {
        let v = p2_values([0.2, 0.3, 0.5]);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
