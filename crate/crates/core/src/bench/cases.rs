use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use crate::fem::{DofMap, ExactSolution, FeSpace, ProblemData, TemperatureBc};
use crate::mesh::{
    barycentric_refine, generate_rectangle_mesh, generate_unit_square_mesh, load_mesh, Mesh,
    TAG_BOTTOM, TAG_LEFT, TAG_RIGHT, TAG_TOP,
};
use crate::solvers::Discretization;

use super::BenchError;

/// Viscosity and diffusivity of every built-in case.
pub const NU: f64 = 0.1;
pub const KAPPA: f64 = 0.1;

/// Built-in substitute for the irregular domain: a 7×1 cavity.
pub const COMPLEX_LENGTH: f64 = 7.0;
pub const COMPLEX_NX: usize = 64;
pub const COMPLEX_NY: usize = 10;

/// Richardson number for a Rayleigh number, from `Ra = Ri·Re²·Pr` with
/// `Re = 1/ν` and `Pr = ν/κ`.
pub fn ri_from_ra(ra: f64, nu: f64, kappa: f64) -> f64 {
    ra * nu * kappa
}

/// Inverse of [`ri_from_ra`], written in the `Ri·Re²·Pr` form.
pub fn ra_from_ri(ri: f64, nu: f64, kappa: f64) -> f64 {
    let re = 1.0 / nu;
    let pr = nu / kappa;
    ri * re * re * pr
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshRecipe {
    UnitSquare { n: usize, refine: bool },
    Rectangle { lx: f64, ly: f64, nx: usize, ny: usize, refine: bool },
    File { path: PathBuf, refine: bool },
}

impl MeshRecipe {
    pub fn build(&self) -> Result<Mesh, BenchError> {
        let (mesh, refine) = match self {
            MeshRecipe::UnitSquare { n, refine } => (generate_unit_square_mesh(*n)?, *refine),
            MeshRecipe::Rectangle { lx, ly, nx, ny, refine } => {
                (generate_rectangle_mesh(*lx, *ly, *nx, *ny)?, *refine)
            }
            MeshRecipe::File { path, refine } => (load_mesh(path)?, *refine),
        };
        Ok(if refine { barycentric_refine(&mesh) } else { mesh })
    }

    pub fn refined(&self) -> bool {
        match self {
            MeshRecipe::UnitSquare { refine, .. }
            | MeshRecipe::Rectangle { refine, .. }
            | MeshRecipe::File { refine, .. } => *refine,
        }
    }
}

type DataFactory = Arc<dyn Fn(f64) -> ProblemData + Send + Sync>;

/// A mesh, its finite element space and a Ra-parameterized problem.
#[derive(Clone)]
pub struct BenchmarkCase {
    pub name: String,
    pub recipe: MeshRecipe,
    /// How the boundary conditions were read, for the run manifest.
    pub note: String,
    /// Mesh before barycentric refinement.
    pub coarse_mesh: Arc<Mesh>,
    space: Arc<FeSpace>,
    data: DataFactory,
    exact: Option<Arc<dyn ExactSolution + Send>>,
}

impl fmt::Debug for BenchmarkCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkCase")
            .field("name", &self.name)
            .field("recipe", &self.recipe)
            .field("triangles", &self.space.dofs().num_triangles())
            .finish()
    }
}

impl BenchmarkCase {
    fn build(
        name: &str,
        recipe: MeshRecipe,
        note: &str,
        bcs: BTreeMap<i32, TemperatureBc>,
        data: DataFactory,
    ) -> Result<Self, BenchError> {
        let coarse = match &recipe {
            MeshRecipe::UnitSquare { n, .. } => generate_unit_square_mesh(*n)?,
            MeshRecipe::Rectangle { lx, ly, nx, ny, .. } => generate_rectangle_mesh(*lx, *ly, *nx, *ny)?,
            MeshRecipe::File { path, .. } => load_mesh(path)?,
        };
        let mesh = if recipe.refined() { barycentric_refine(&coarse) } else { coarse.clone() };
        let dofs = DofMap::new(Arc::new(mesh), &bcs)?;
        Ok(Self {
            name: name.to_string(),
            recipe,
            note: note.to_string(),
            coarse_mesh: Arc::new(coarse),
            space: Arc::new(FeSpace::new(Arc::new(dofs))),
            data,
            exact: None,
        })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.space.dofs().mesh()
    }

    pub fn problem(&self, ra: f64) -> ProblemData {
        (self.data)(ra)
    }

    /// Discretization at Rayleigh number `ra`.
    pub fn discretization(&self, ra: f64) -> Discretization {
        Discretization::new(self.space.clone(), self.problem(ra))
    }

    pub fn exact(&self) -> Option<&(dyn ExactSolution + Send)> {
        self.exact.as_deref()
    }
}

fn bc_data(bcs: BTreeMap<i32, TemperatureBc>) -> DataFactory {
    Arc::new(move |ra| {
        ProblemData::new(NU, KAPPA, ri_from_ra(ra, NU, KAPPA), bcs.clone())
            .expect("built-in coefficients are valid")
    })
}

pub fn cavity_bcs() -> BTreeMap<i32, TemperatureBc> {
    BTreeMap::from([
        (TAG_BOTTOM, TemperatureBc::Neumann),
        (TAG_RIGHT, TemperatureBc::dirichlet(|_, _| 1.0)),
        (TAG_TOP, TemperatureBc::Neumann),
        (TAG_LEFT, TemperatureBc::dirichlet(|_, _| 0.0)),
    ])
}

pub const CAVITY_NOTE: &str = "differentially heated cavity: T = 0 on x = 0, T = 1 on x = 1, \
zero heat flux on y = 0 and y = 1; the zero-flux condition is read as applying to the \
horizontal walls, since the vertical walls carry the Dirichlet data";

/// Unit-square cavity heated from the right, no-slip walls, f = g = 0.
pub fn heated_cavity_case(n: usize, refine: bool) -> Result<BenchmarkCase, BenchError> {
    if n < 2 {
        return Err(BenchError::Invalid(format!("cavity needs n >= 2, got {n}")));
    }
    BenchmarkCase::build(
        "cavity",
        MeshRecipe::UnitSquare { n, refine },
        CAVITY_NOTE,
        cavity_bcs(),
        bc_data(cavity_bcs()),
    )
}

pub fn complex_bcs() -> BTreeMap<i32, TemperatureBc> {
    BTreeMap::from([
        (TAG_BOTTOM, TemperatureBc::dirichlet(|x, _| 2.0 * x / COMPLEX_LENGTH)),
        (TAG_RIGHT, TemperatureBc::Neumann),
        (TAG_TOP, TemperatureBc::dirichlet(|_, _| 1.0)),
        (TAG_LEFT, TemperatureBc::Neumann),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComplexSource {
    /// The 7×1 rectangle on an `nx × ny` grid.
    Builtin { nx: usize, ny: usize, refine: bool },
    /// A user mesh whose boundary uses tag 1 for the bottom (T = 2x/7),
    /// tag 3 for the top (T = 1) and tags 2 and 4 for insulated walls.
    File { path: PathBuf, refine: bool },
}

impl Default for ComplexSource {
    fn default() -> Self {
        ComplexSource::Builtin {
            nx: COMPLEX_NX,
            ny: COMPLEX_NY,
            refine: true,
        }
    }
}

pub const COMPLEX_NOTE: &str = "cavity with T = 1 on the top wall (tag 3), T = 2x/7 on the \
bottom wall (tag 1) and zero heat flux on tags 2 and 4; the built-in geometry is a 7x1 \
rectangle standing in for the irregular domain";

pub fn complex_cavity_case(source: ComplexSource) -> Result<BenchmarkCase, BenchError> {
    let recipe = match source {
        ComplexSource::Builtin { nx, ny, refine } => MeshRecipe::Rectangle {
            lx: COMPLEX_LENGTH,
            ly: 1.0,
            nx,
            ny,
            refine,
        },
        ComplexSource::File { path, refine } => MeshRecipe::File { path, refine },
    };
    BenchmarkCase::build("complex", recipe, COMPLEX_NOTE, complex_bcs(), bc_data(complex_bcs()))
}

/// Cavity case on a mesh file, with the cavity boundary conditions by tag.
pub fn file_cavity_case(path: PathBuf, refine: bool) -> Result<BenchmarkCase, BenchError> {
    BenchmarkCase::build(
        "file",
        MeshRecipe::File { path, refine },
        "mesh file with cavity conditions by tag: T = 0 on tag 4, T = 1 on tag 2, \
zero heat flux on tags 1 and 3",
        cavity_bcs(),
        bc_data(cavity_bcs()),
    )
}

/// Richardson number of the manufactured solution at its default Ra.
pub const MMS_RI: f64 = 1.0;

/// Smooth manufactured solution on the unit square:
/// u = curl ψ with ψ = x²(1−x)²y²(1−y)², p = sin πx cos πy,
/// T = cos πx cos πy. The velocity vanishes on the boundary, p has zero
/// mean, and ∂T/∂y = 0 on y = 0, 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct Manufactured;

/// a(s) = s²(1−s)² and its derivatives up to third order.
fn bump(s: f64) -> [f64; 4] {
    [
        s * s * (1.0 - s) * (1.0 - s),
        2.0 * s - 6.0 * s * s + 4.0 * s * s * s,
        2.0 - 12.0 * s + 12.0 * s * s,
        -12.0 + 24.0 * s,
    ]
}

impl Manufactured {
    /// Body force making the solution exact for viscosity ν and Richardson
    /// number ri.
    pub fn force(&self, x: f64, y: f64, nu: f64, ri: f64) -> [f64; 2] {
        let a = bump(x);
        let b = bump(y);
        let [u1, u2] = self.velocity(x, y);
        let lap1 = a[2] * b[1] + a[0] * b[3];
        let lap2 = -a[3] * b[0] - a[1] * b[2];
        let adv1 = u1 * a[1] * b[1] + u2 * a[0] * b[2];
        let adv2 = -u1 * a[2] * b[0] - u2 * a[1] * b[1];
        let px = PI * (PI * x).cos() * (PI * y).cos();
        let py = -PI * (PI * x).sin() * (PI * y).sin();
        [
            -nu * lap1 + adv1 + px,
            -nu * lap2 + adv2 + py - ri * self.temperature(x, y),
        ]
    }

    pub fn heat_source(&self, x: f64, y: f64, kappa: f64) -> f64 {
        let [u1, u2] = self.velocity(x, y);
        let [tx, ty] = self.temperature_gradient(x, y);
        kappa * 2.0 * PI * PI * self.temperature(x, y) + u1 * tx + u2 * ty
    }
}

impl ExactSolution for Manufactured {
    fn velocity(&self, x: f64, y: f64) -> [f64; 2] {
        let a = bump(x);
        let b = bump(y);
        [a[0] * b[1], -a[1] * b[0]]
    }

    fn velocity_gradient(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let a = bump(x);
        let b = bump(y);
        [[a[1] * b[1], a[0] * b[2]], [-a[2] * b[0], -a[1] * b[1]]]
    }

    fn pressure(&self, x: f64, y: f64) -> f64 {
        (PI * x).sin() * (PI * y).cos()
    }

    fn temperature(&self, x: f64, y: f64) -> f64 {
        (PI * x).cos() * (PI * y).cos()
    }

    fn temperature_gradient(&self, x: f64, y: f64) -> [f64; 2] {
        [
            -PI * (PI * x).sin() * (PI * y).cos(),
            -PI * (PI * x).cos() * (PI * y).sin(),
        ]
    }
}

pub fn mms_bcs() -> BTreeMap<i32, TemperatureBc> {
    let t = |x: f64, y: f64| Manufactured.temperature(x, y);
    BTreeMap::from([
        (TAG_BOTTOM, TemperatureBc::Neumann),
        (TAG_RIGHT, TemperatureBc::dirichlet(t)),
        (TAG_TOP, TemperatureBc::Neumann),
        (TAG_LEFT, TemperatureBc::dirichlet(t)),
    ])
}

/// Manufactured-solution case on the barycentric refined n×n square. The
/// Rayleigh number sets Ri as for the other cases; the source terms follow.
pub fn mms_case(n: usize) -> Result<BenchmarkCase, BenchError> {
    if n < 2 {
        return Err(BenchError::Invalid(format!("manufactured case needs n >= 2, got {n}")));
    }
    let factory: DataFactory = Arc::new(|ra| {
        let ri = ri_from_ra(ra, NU, KAPPA);
        ProblemData::new(NU, KAPPA, ri, mms_bcs())
            .expect("built-in coefficients are valid")
            .with_force(move |x, y| Manufactured.force(x, y, NU, ri))
            .with_heat_source(|x, y| Manufactured.heat_source(x, y, KAPPA))
    });
    let mut case = BenchmarkCase::build(
        "mms",
        MeshRecipe::UnitSquare { n, refine: true },
        "manufactured solution: psi = x^2(1-x)^2 y^2(1-y)^2, p = sin(pi x)cos(pi y), \
T = cos(pi x)cos(pi y); T Dirichlet on x = 0, 1 and zero flux on y = 0, 1",
        mms_bcs(),
        factory,
    )?;
    case.exact = Some(Arc::new(Manufactured));
    Ok(case)
}

/// Rayleigh number at which the manufactured case has Ri = [`MMS_RI`].
pub fn mms_ra() -> f64 {
    ra_from_ri(MMS_RI, NU, KAPPA)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ra_ri_mapping() {
        assert_eq!(ri_from_ra(1e4, NU, KAPPA), 100.0);
        assert_eq!(ri_from_ra(0.0, NU, KAPPA), 0.0);
        for ra in [1.0, 1e3, 2.5e5, 7.5e5] {
            let ri = ri_from_ra(ra, NU, KAPPA);
            assert!((ra_from_ri(ri, NU, KAPPA) - ra).abs() <= 1e-10 * ra);
            // unequal coefficients
            let ri = ri_from_ra(ra, 0.05, 0.2);
            assert!((ra_from_ri(ri, 0.05, 0.2) - ra).abs() <= 1e-10 * ra);
        }
        assert!((mms_ra() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn cavity_counts() {
        let c = heated_cavity_case(4, true).unwrap();
        assert_eq!(c.mesh().num_triangles(), 3 * 32);
        assert_eq!(c.coarse_mesh.num_triangles(), 32);
        assert!(heated_cavity_case(1, true).is_err());
        let c = heated_cavity_case(4, false).unwrap();
        assert_eq!(c.mesh().num_triangles(), 32);
    }

    #[test]
    fn complex_bottom_data() {
        let c = complex_cavity_case(ComplexSource::Builtin { nx: 8, ny: 2, refine: true }).unwrap();
        let dofs = c.space().dofs();
        let coords = dofs.node_coords();
        let mid = (0..dofs.n_scalar())
            .find(|&i| (coords[i][0] - 3.5).abs() < 1e-12 && coords[i][1] == 0.0)
            .unwrap();
        assert_eq!(dofs.temperature_dirichlet_value(mid), Some(1.0));
        assert!((c.mesh().area() - 7.0).abs() < 1e-12);
    }

    // Finite-difference oracle: rebuild u, ∇u, Δu, ∇p, ∇T, ΔT from ψ, p
    // and T by central differences and evaluate the residual of the PDE.
    fn fd_residual(x: f64, y: f64, nu: f64, kappa: f64, ri: f64) -> ([f64; 2], f64) {
        let psi = |x: f64, y: f64| (x * x * (1.0 - x).powi(2)) * (y * y * (1.0 - y).powi(2));
        let h = 1e-3;
        let u = |x: f64, y: f64| {
            [
                (psi(x, y + h) - psi(x, y - h)) / (2.0 * h),
                -(psi(x + h, y) - psi(x - h, y)) / (2.0 * h),
            ]
        };
        let p = |x: f64, y: f64| (PI * x).sin() * (PI * y).cos();
        let t = |x: f64, y: f64| (PI * x).cos() * (PI * y).cos();
        let d = |f: &dyn Fn(f64, f64) -> f64, dx: f64, dy: f64| {
            (f(x + dx, y + dy) - f(x - dx, y - dy)) / (2.0 * (dx + dy))
        };
        let lap = |f: &dyn Fn(f64, f64) -> f64| {
            (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h)
        };
        let uv = u(x, y);
        let mut f = [0.0; 2];
        for c in 0..2 {
            let uc = move |x: f64, y: f64| u(x, y)[c];
            let adv = uv[0] * d(&uc, h, 0.0) + uv[1] * d(&uc, 0.0, h);
            let dp = if c == 0 { d(&p, h, 0.0) } else { d(&p, 0.0, h) };
            f[c] = -nu * lap(&uc) + adv + dp - if c == 1 { ri * t(x, y) } else { 0.0 };
        }
        let g = -kappa * lap(&t) + uv[0] * d(&t, h, 0.0) + uv[1] * d(&t, 0.0, h);
        (f, g)
    }

    #[test]
    fn manufactured_sources_match_finite_differences() {
        for &(x, y) in &[(0.5, 0.5), (0.3, 0.7), (0.81, 0.12)] {
            let (f_fd, g_fd) = fd_residual(x, y, NU, KAPPA, 2.5);
            let f = Manufactured.force(x, y, NU, 2.5);
            let g = Manufactured.heat_source(x, y, KAPPA);
            for c in 0..2 {
                assert!((f[c] - f_fd[c]).abs() < 1e-4, "f[{c}] at ({x},{y}): {} vs {}", f[c], f_fd[c]);
            }
            assert!((g - g_fd).abs() < 1e-4, "g at ({x},{y})");
        }
    }

    #[test]
    fn manufactured_solution_properties() {
        let m = Manufactured;
        for &(x, y) in &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.3, 0.0), (1.0, 0.6)] {
            assert_eq!(m.velocity(x, y), [0.0, 0.0]);
        }
        for &(x, y) in &[(0.2, 0.9), (0.6, 0.4)] {
            let g = m.velocity_gradient(x, y);
            assert!((g[0][0] + g[1][1]).abs() < 1e-15);
        }
        for x in [0.1, 0.5, 0.77] {
            assert!(m.temperature_gradient(x, 0.0)[1].abs() < 1e-15);
            assert!(m.temperature_gradient(x, 1.0)[1].abs() < 1e-15);
        }
    }
}
