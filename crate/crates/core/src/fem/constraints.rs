use crate::linsolve::LinearSystem;
use crate::sparse::TripletBuilder;

/// Zero weighted mean `Σ w_k x_{offset+k} = 0` over a block whose only
/// null mode is the constant vector (the pressure of an enclosed flow).
#[derive(Debug, Clone)]
pub struct MeanConstraint {
    pub offset: usize,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Constraints {
    /// (dof, prescribed value); later duplicates of a dof are ignored.
    pub dirichlet: Vec<(usize, f64)>,
    pub mean: Option<MeanConstraint>,
}

impl Constraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fix(mut self, dofs: impl IntoIterator<Item = (usize, f64)>, offset: usize) -> Self {
        self.dirichlet
            .extend(dofs.into_iter().map(|(d, v)| (d + offset, v)));
        self
    }

    pub fn zero_mean(mut self, offset: usize, weights: &[f64]) -> Self {
        self.mean = Some(MeanConstraint {
            offset,
            weights: weights.to_vec(),
        });
        self
    }
}

/// Imposes Dirichlet values by replacing their rows with identity rows and
/// lifting their columns into the right-hand side.
///
/// A mean constraint is handled by pinning the first free dof of its block
/// to zero, which removes the constant null mode, and recording the
/// constraint on the system so that [`solve_direct`](crate::linsolve::solve_direct)
/// shifts the block to zero mean afterwards. This gives the same solution
/// as a bordered Lagrange multiplier system (whose multiplier vanishes for
/// a consistent right-hand side) without a dense row and column, which
/// would wreck the fill-reducing ordering of the factorization.
pub fn apply_constraints(system: LinearSystem, constraints: &Constraints) -> LinearSystem {
    let LinearSystem { matrix, rhs, .. } = system;
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "constraints need a square system");
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for &(d, v) in &constraints.dirichlet {
        if fixed[d].is_none() {
            fixed[d] = Some(v);
        }
    }

    if let Some(mean) = &constraints.mean {
        let pin = (mean.offset..mean.offset + mean.weights.len())
            .find(|&d| fixed[d].is_none())
            .expect("mean constraint over a fully fixed block");
        fixed[pin] = Some(0.0);
    }

    let mut b = TripletBuilder::with_capacity(n, n, matrix.nnz());
    let mut new_rhs = rhs;
    for i in 0..n {
        if let Some(v) = fixed[i] {
            b.push(i, i, 1.0);
            new_rhs[i] = v;
            continue;
        }
        for (j, a) in matrix.row(i) {
            match fixed[j] {
                Some(v) => new_rhs[i] -= a * v,
                None => b.push(i, j, a),
            }
        }
    }
    LinearSystem {
        matrix: b.build(),
        rhs: new_rhs,
        mean: constraints.mean.clone(),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::fem::{DofMap, FeSpace, Space, TemperatureBc};
    use crate::linsolve::solve_direct;
    use crate::mesh::{barycentric_refine, generate_unit_square_mesh};

    #[test]
    fn dirichlet_laplace_reproduces_constant() {
        let mesh = Arc::new(barycentric_refine(&generate_unit_square_mesh(3).unwrap()));
        let bcs: BTreeMap<_, _> = (1..=4).map(|t| (t, TemperatureBc::dirichlet(|_, _| 1.0))).collect();
        let dofs = Arc::new(DofMap::new(mesh, &bcs).unwrap());
        let s = FeSpace::new(dofs.clone());
        let a = s.assemble_diffusion(Space::Temperature, 1.0);
        let sys = LinearSystem::new(a, vec![0.0; dofs.n_scalar()]);
        let sys = apply_constraints(sys, &Constraints::new().fix(dofs.temperature_dirichlet_dofs(), 0));
        let x = solve_direct(&sys).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn lifting_moves_columns_to_rhs() {
        let m = crate::sparse::CsrMatrix::from_dense(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ]);
        let sys = apply_constraints(
            LinearSystem::new(m, vec![0.0, 0.0, 0.0]),
            &Constraints::new().fix([(0, 1.0), (2, 3.0)], 0),
        );
        assert_eq!(sys.rhs, vec![1.0, 4.0, 3.0]);
        assert_eq!(
            sys.matrix.to_dense(),
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]]
        );
        assert_eq!(solve_direct(&sys).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn mean_constraint_removes_the_constant_mode() {
        let m = crate::sparse::CsrMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let sys = apply_constraints(
            LinearSystem::new(m, vec![1.0, -1.0]),
            &Constraints::new().zero_mean(0, &[1.0, 1.0]),
        );
        assert_eq!(sys.matrix.nrows(), 2);
        let x = solve_direct(&sys).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn mean_constraint_skips_fixed_dofs_when_pinning() {
        // x0 fixed to 2; x1, x2 form a singular pair with weights (1, 3)
        let m = crate::sparse::CsrMatrix::from_dense(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ]);
        let sys = apply_constraints(
            LinearSystem::new(m, vec![0.0, 1.0, -1.0]),
            &Constraints::new().fix([(0, 2.0)], 0).zero_mean(1, &[1.0, 3.0]),
        );
        let x = solve_direct(&sys).unwrap();
        assert_eq!(x[0], 2.0);
        assert!((x[1] - x[2] - 1.0).abs() < 1e-15);
        assert!((x[1] + 3.0 * x[2]).abs() < 1e-15);
    }
}
