//! Conforming triangle meshes with tagged boundary edges.
//!
//! Meshes are generated on axis-aligned rectangles, refined by barycentric
//! (Alfeld) splitting, and read from or written to a small ASCII format:
//!
//! ```text
//! # comment lines start with '#'
//! NV NT NB
//! x y            (NV lines)
//! i j k          (NT lines, 0-based, counterclockwise)
//! i j tag        (NB lines)
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

/// Side tags used by the rectangle generator.
pub const TAG_BOTTOM: i32 = 1;
pub const TAG_RIGHT: i32 = 2;
pub const TAG_TOP: i32 = 3;
pub const TAG_LEFT: i32 = 4;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("subdivision count must be at least 1")]
    ZeroSubdivisions,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("triangle {index} has non-positive signed area {area:e}")]
    InvertedTriangle { index: usize, area: f64 },
    #[error("triangle {index} references vertex {vertex} out of range")]
    VertexOutOfRange { index: usize, vertex: usize },
    #[error("edge ({0}, {1}) is shared by more than two triangles (first offending triangle {2})")]
    NonManifoldEdge(usize, usize, usize),
    #[error("boundary edge ({0}, {1}) has no tag")]
    UntaggedBoundary(usize, usize),
    #[error("tagged edge {index} ({a}, {b}) is not a boundary edge")]
    TaggedInteriorEdge { index: usize, a: usize, b: usize },
    #[error("edge ({0}, {1}) is tagged more than once")]
    DuplicateTag(usize, usize),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: i32,
}

/// Unique edge of the triangulation, endpoints sorted ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

/// Edge table: the unique edges and, per triangle, the edge index of its
/// local edges (v0,v1), (v1,v2), (v2,v0).
#[derive(Debug, Clone)]
pub struct EdgeTable {
    pub edges: Vec<Edge>,
    pub triangle_edges: Vec<[usize; 3]>,
    /// Number of triangles adjacent to each edge.
    pub multiplicity: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub triangles: usize,
    pub edges: usize,
    pub boundary_edges: usize,
    pub area: f64,
    pub max_diameter: f64,
    pub min_diameter: f64,
}

#[inline]
fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn signed_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

fn distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

impl Mesh {
    /// Builds a mesh and checks every invariant.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self, MeshError> {
        let mesh = Self {
            vertices,
            triangles,
            boundary_edges,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn triangle_diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        distance(a, b).max(distance(b, c)).max(distance(c, a))
    }

    /// Total area, summed with Neumaier compensation so that refinement
    /// preserves it to a few ulps even on fine meshes.
    pub fn area(&self) -> f64 {
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for t in 0..self.num_triangles() {
            let a = self.triangle_area(t);
            let s = sum + a;
            comp += if sum.abs() >= a.abs() { (sum - s) + a } else { (a - s) + sum };
            sum = s;
        }
        sum + comp
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.triangle_diameter(t))
            .fold(0.0, f64::max)
    }

    /// Enumerates unique edges in order of first appearance.
    pub fn edge_table(&self) -> EdgeTable {
        let mut index: HashMap<(usize, usize), usize> =
            HashMap::with_capacity(self.triangles.len() * 2);
        let mut edges = Vec::new();
        let mut multiplicity = Vec::new();
        let mut triangle_edges = Vec::with_capacity(self.triangles.len());
        for tri in &self.triangles {
            let mut local = [0usize; 3];
            for (k, slot) in local.iter_mut().enumerate() {
                let key = edge_key(tri[k], tri[(k + 1) % 3]);
                let id = *index.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                    });
                    multiplicity.push(0u8);
                    edges.len() - 1
                });
                multiplicity[id] = multiplicity[id].saturating_add(1);
                *slot = id;
            }
            triangle_edges.push(local);
        }
        EdgeTable {
            edges,
            triangle_edges,
            multiplicity,
        }
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let nv = self.vertices.len();
        for (index, tri) in self.triangles.iter().enumerate() {
            if let Some(&vertex) = tri.iter().find(|&&v| v >= nv) {
                return Err(MeshError::VertexOutOfRange { index, vertex });
            }
            let area = self.triangle_area(index);
            // Relative to the local edge scale so tiny but valid elements pass.
            let scale = self.triangle_diameter(index).powi(2);
            if !(area > 1e-14 * scale) {
                return Err(MeshError::InvertedTriangle { index, area });
            }
        }

        let table = self.edge_table();
        for (t, local) in table.triangle_edges.iter().enumerate() {
            for &e in local {
                if table.multiplicity[e] > 2 {
                    let [a, b] = table.edges[e].vertices;
                    return Err(MeshError::NonManifoldEdge(a, b, t));
                }
            }
        }

        let mut tagged = BTreeSet::new();
        let lookup: HashMap<(usize, usize), usize> = table
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.vertices[0], e.vertices[1]), i))
            .collect();
        for (index, be) in self.boundary_edges.iter().enumerate() {
            let [a, b] = be.vertices;
            let key = edge_key(a, b);
            match lookup.get(&key) {
                Some(&e) if table.multiplicity[e] == 1 => {}
                _ => return Err(MeshError::TaggedInteriorEdge { index, a, b }),
            }
            if !tagged.insert(key) {
                return Err(MeshError::DuplicateTag(a, b));
            }
        }
        for (e, edge) in table.edges.iter().enumerate() {
            let key = (edge.vertices[0], edge.vertices[1]);
            if table.multiplicity[e] == 1 && !tagged.contains(&key) {
                return Err(MeshError::UntaggedBoundary(key.0, key.1));
            }
        }
        Ok(())
    }

    /// Tag lookup keyed by the sorted vertex pair.
    pub fn boundary_tag_map(&self) -> HashMap<(usize, usize), i32> {
        self.boundary_edges
            .iter()
            .map(|be| (edge_key(be.vertices[0], be.vertices[1]), be.tag))
            .collect()
    }

    /// Vertices touched by at least one boundary edge, ascending.
    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        self.boundary_edges
            .iter()
            .flat_map(|be| be.vertices)
            .collect()
    }

    pub fn stats(&self) -> MeshStats {
        let diameters = (0..self.num_triangles()).map(|t| self.triangle_diameter(t));
        let (min_d, max_d) =
            diameters.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
        MeshStats {
            vertices: self.num_vertices(),
            triangles: self.num_triangles(),
            edges: self.edge_table().edges.len(),
            boundary_edges: self.boundary_edges.len(),
            area: self.area(),
            max_diameter: max_d,
            min_diameter: if min_d.is_finite() { min_d } else { 0.0 },
        }
    }

    /// Serializes to the native ASCII format. Coordinates use shortest
    /// round-trip formatting so a read-back is bit-identical.
    pub fn to_ascii(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} {}",
            self.vertices.len(),
            self.triangles.len(),
            self.boundary_edges.len()
        );
        for [x, y] in &self.vertices {
            let _ = writeln!(out, "{x:?} {y:?}");
        }
        for [i, j, k] in &self.triangles {
            let _ = writeln!(out, "{i} {j} {k}");
        }
        for be in &self.boundary_edges {
            let _ = writeln!(out, "{} {} {}", be.vertices[0], be.vertices[1], be.tag);
        }
        out
    }

    pub fn from_ascii(text: &str) -> Result<Self, MeshError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let mut next_fields = |what: &str| -> Result<(usize, Vec<&str>), MeshError> {
            let (line, content) = lines.next().ok_or_else(|| MeshError::Parse {
                line: text.lines().count() + 1,
                message: format!("unexpected end of file, expected {what}"),
            })?;
            Ok((line, content.split_whitespace().collect()))
        };

        fn parse<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, MeshError> {
            s.parse().map_err(|_| MeshError::Parse {
                line,
                message: format!("invalid {what} '{s}'"),
            })
        }
        fn arity(line: usize, fields: &[&str], n: usize, what: &str) -> Result<(), MeshError> {
            if fields.len() != n {
                return Err(MeshError::Parse {
                    line,
                    message: format!("expected {n} fields for {what}, found {}", fields.len()),
                });
            }
            Ok(())
        }

        let (line, header) = next_fields("header 'NV NT NB'")?;
        arity(line, &header, 3, "header")?;
        let nv: usize = parse(line, header[0], "vertex count")?;
        let nt: usize = parse(line, header[1], "triangle count")?;
        let nb: usize = parse(line, header[2], "boundary edge count")?;

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (line, f) = next_fields("vertex")?;
            arity(line, &f, 2, "vertex")?;
            vertices.push([parse(line, f[0], "coordinate")?, parse(line, f[1], "coordinate")?]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (line, f) = next_fields("triangle")?;
            arity(line, &f, 3, "triangle")?;
            triangles.push([
                parse(line, f[0], "vertex index")?,
                parse(line, f[1], "vertex index")?,
                parse(line, f[2], "vertex index")?,
            ]);
        }
        let mut boundary_edges = Vec::with_capacity(nb);
        for _ in 0..nb {
            let (line, f) = next_fields("boundary edge")?;
            arity(line, &f, 3, "boundary edge")?;
            boundary_edges.push(BoundaryEdge {
                vertices: [parse(line, f[0], "vertex index")?, parse(line, f[1], "vertex index")?],
                tag: parse(line, f[2], "tag")?,
            });
        }
        if let Some((line, _)) = lines.next() {
            return Err(MeshError::Parse {
                line,
                message: "trailing data after the declared entities".into(),
            });
        }
        Mesh::new(vertices, triangles, boundary_edges)
    }
}

/// Uniform rectangle grid on [0,lx]×[0,ly], each cell split along its
/// (0,0)→(1,1) diagonal. Sides are tagged bottom/right/top/left = 1/2/3/4.
pub fn generate_rectangle_mesh(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Mesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::ZeroSubdivisions);
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge { vertices: [id(i, 0), id(i + 1, 0)], tag: TAG_BOTTOM });
    }
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge { vertices: [id(nx, j), id(nx, j + 1)], tag: TAG_RIGHT });
    }
    for i in (0..nx).rev() {
        boundary_edges.push(BoundaryEdge { vertices: [id(i + 1, ny), id(i, ny)], tag: TAG_TOP });
    }
    for j in (0..ny).rev() {
        boundary_edges.push(BoundaryEdge { vertices: [id(0, j + 1), id(0, j)], tag: TAG_LEFT });
    }
    Ok(Mesh {
        vertices,
        triangles,
        boundary_edges,
    })
}

/// `2n²` right triangles on the unit square.
pub fn generate_unit_square_mesh(n: usize) -> Result<Mesh, MeshError> {
    generate_rectangle_mesh(1.0, 1.0, n, n)
}

/// Splits every triangle into three by connecting its barycenter to the
/// vertices. Barycenters are appended after the original vertices in
/// triangle order; boundary edges are untouched.
pub fn barycentric_refine(mesh: &Mesh) -> Mesh {
    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices.clone();
    vertices.reserve(mesh.num_triangles());
    let mut triangles = Vec::with_capacity(3 * mesh.num_triangles());
    for (t, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        let (pa, pb, pc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);
        vertices.push([(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0]);
        let z = nv + t;
        triangles.push([a, b, z]);
        triangles.push([b, c, z]);
        triangles.push([c, a, z]);
    }
    Mesh {
        vertices,
        triangles,
        boundary_edges: mesh.boundary_edges.clone(),
    }
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Mesh::from_ascii(&text)
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let path = path.as_ref();
    std::fs::write(path, mesh.to_ascii()).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_n1() {
        let m = generate_unit_square_mesh(1).unwrap();
        assert_eq!(m.num_triangles(), 2);
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.boundary_edges.len(), 4);
        m.validate().unwrap();
    }

    #[test]
    fn zero_subdivisions_rejected() {
        assert!(matches!(generate_unit_square_mesh(0), Err(MeshError::ZeroSubdivisions)));
    }

    #[test]
    fn euler_characteristic_n2() {
        let m = generate_unit_square_mesh(2).unwrap();
        assert_eq!(m.num_triangles(), 8);
        assert_eq!(m.num_vertices(), 9);
        // brute-force edge enumeration over all vertex pairs
        let mut edges = BTreeSet::new();
        for t in &m.triangles {
            for a in 0..3 {
                for b in 0..3 {
                    if a != b {
                        edges.insert(edge_key(t[a], t[b]));
                    }
                }
            }
        }
        let e = edges.len() as i64;
        assert_eq!(e, 16);
        assert_eq!(m.num_vertices() as i64 - e + (m.num_triangles() as i64 + 1), 2);
        assert_eq!(m.edge_table().edges.len() as i64, e);
    }

    #[test]
    fn n64_counts_and_diameter() {
        let m = generate_unit_square_mesh(64).unwrap();
        assert_eq!(m.num_triangles(), 8192);
        assert!((m.max_diameter() - 2f64.sqrt() / 64.0).abs() < 1e-15);
        assert_eq!(barycentric_refine(&m).num_triangles(), 24576);
    }

    #[test]
    fn refine_two_triangles() {
        let m = generate_unit_square_mesh(1).unwrap();
        let r = barycentric_refine(&m);
        assert_eq!(r.num_triangles(), 6);
        assert_eq!(r.num_vertices(), 6);
        assert_eq!(r.boundary_edges, m.boundary_edges);
        assert_eq!(r.boundary_vertices(), m.boundary_vertices());
        r.validate().unwrap();
    }

    #[test]
    fn refine_preserves_area() {
        for (lx, nx, ny) in [(7.0, 13, 5), (7.0, 64, 10), (1.0, 64, 64)] {
            let m = generate_rectangle_mesh(lx, 1.0, nx, ny).unwrap();
            let r = barycentric_refine(&m);
            assert!(((r.area() - m.area()) / m.area()).abs() <= 1e-14);
            assert!(((m.area() - lx) / lx).abs() <= 1e-14);
            assert_eq!(r.num_triangles(), 3 * m.num_triangles());
        }
    }

    #[test]
    fn interior_edges_shared_by_two() {
        let m = barycentric_refine(&generate_unit_square_mesh(4).unwrap());
        let table = m.edge_table();
        let boundary = table.multiplicity.iter().filter(|&&c| c == 1).count();
        assert_eq!(boundary, m.boundary_edges.len());
        assert!(table.multiplicity.iter().all(|&c| c == 1 || c == 2));
    }

    #[test]
    fn ascii_roundtrip_n1() {
        let m = generate_unit_square_mesh(1).unwrap();
        let text = format!("# unit square\n{}", m.to_ascii());
        assert_eq!(Mesh::from_ascii(&text).unwrap(), m);
    }

    #[test]
    fn zero_area_triangle_named() {
        let text = "4 2 0\n0 0\n1 0\n2 0\n0 1\n0 1 3\n0 1 2\n";
        match Mesh::from_ascii(text) {
            Err(MeshError::InvertedTriangle { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_error_has_line_number() {
        let text = "# header follows\n3 1 3\n0 0\n1 zero\n0 1\n0 1 2\n";
        match Mesh::from_ascii(text) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn untagged_boundary_rejected() {
        let text = "3 1 2\n0 0\n1 0\n0 1\n0 1 2\n0 1 1\n1 2 1\n";
        assert!(matches!(Mesh::from_ascii(text), Err(MeshError::UntaggedBoundary(0, 2))));
    }

    #[test]
    fn non_manifold_edge_rejected() {
        let text = "5 3 0\n0 0\n1 0\n0 1\n0 -1\n2 1\n0 1 2\n1 0 3\n0 1 4\n";
        let err = Mesh::from_ascii(text).unwrap_err();
        assert!(matches!(err, MeshError::NonManifoldEdge(0, 1, _)), "{err}");
    }
}
