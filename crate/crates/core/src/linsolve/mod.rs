//! Direct sparse solves and the small dense least-squares problems of
//! Anderson acceleration.

mod anderson;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;
use thiserror::Error;

use crate::fem::MeanConstraint;
use crate::sparse::CsrMatrix;

pub use anderson::{
    anderson_coefficients, anderson_mix, AndersonCoefficients, AndersonError, AndersonHistory,
    Euclidean, InnerProduct,
};

/// Relative residual every direct solve must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-11;
const MAX_REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("matrix is singular (pivot {pivot:?})")]
    Singular { pivot: Option<usize> },
    #[error("non-finite entry in the {0}")]
    NonFinite(&'static str),
    #[error("system is {rows}x{cols} with a right-hand side of length {rhs}")]
    Shape { rows: usize, cols: usize, rhs: usize },
    #[error("relative residual {residual:e} above {RESIDUAL_TOLERANCE:e} after refinement")]
    Residual { residual: f64 },
    #[error("factorization failed: {0}")]
    Backend(String),
}

/// Square sparse system with its right-hand side. `mean` is a zero-mean
/// condition applied to the solution after the solve (see
/// [`apply_constraints`](crate::fem::apply_constraints)).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub mean: Option<MeanConstraint>,
}

impl LinearSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>) -> Self {
        Self {
            matrix,
            rhs,
            mean: None,
        }
    }

    /// ‖Ax − b‖ / ‖b‖ (or ‖Ax‖ when b = 0).
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        let rn = norm2(&r);
        let bn = norm2(&self.rhs);
        if bn > 0.0 {
            rn / bn
        } else {
            rn
        }
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.rhs.clone();
        self.matrix.mul_vec_add(-1.0, x, &mut r);
        r
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sparse LU with partial pivoting and a fill-reducing column ordering,
/// followed by iterative refinement until the relative residual is below
/// [`RESIDUAL_TOLERANCE`].
pub fn solve_direct(sys: &LinearSystem) -> Result<Vec<f64>, SolveError> {
    let n = sys.matrix.nrows();
    if sys.matrix.ncols() != n || sys.rhs.len() != n {
        return Err(SolveError::Shape {
            rows: n,
            cols: sys.matrix.ncols(),
            rhs: sys.rhs.len(),
        });
    }
    if !sys.matrix.is_finite() {
        return Err(SolveError::NonFinite("matrix"));
    }
    if sys.rhs.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::NonFinite("right-hand side"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let triplets: Vec<Triplet<usize, usize, f64>> =
        sys.matrix.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| SolveError::Backend(format!("{e:?}")))?;
    let lu = a.sp_lu().map_err(|e| match e {
        faer::sparse::linalg::LuError::SymbolicSingular { index } => SolveError::Singular {
            pivot: Some(index),
        },
        other => SolveError::Backend(format!("{other:?}")),
    })?;

    let solve = |b: &[f64]| -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(n, |i| b[i]);
        let x = lu.solve(&rhs);
        (0..n).map(|i| x[i]).collect()
    };

    let mut x = solve(&sys.rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::Singular { pivot: None });
    }
    let mut residual = sys.relative_residual(&x);
    let mut steps = 0;
    while residual > RESIDUAL_TOLERANCE && steps < MAX_REFINEMENT_STEPS {
        let dx = solve(&sys.residual(&x));
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        residual = sys.relative_residual(&x);
        steps += 1;
    }
    if !residual.is_finite() {
        return Err(SolveError::Singular { pivot: None });
    }
    if residual > RESIDUAL_TOLERANCE {
        return Err(SolveError::Residual { residual });
    }
    if let Some(mean) = &sys.mean {
        let block = &mut x[mean.offset..mean.offset + mean.weights.len()];
        let total: f64 = mean.weights.iter().sum();
        let shift = mean.weights.iter().zip(block.iter()).map(|(w, v)| w * v).sum::<f64>() / total;
        block.iter_mut().for_each(|v| *v -= shift);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let b = vec![3.0, -1.5, 2.25, 0.0];
        let sys = LinearSystem::new(CsrMatrix::identity(4), b.clone());
        assert_eq!(solve_direct(&sys).unwrap(), b);
    }

    #[test]
    fn two_by_two() {
        let m = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = solve_direct(&LinearSystem::new(m, vec![3.0, 4.0])).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn needs_pivoting() {
        let m = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let x = solve_direct(&LinearSystem::new(m, vec![2.0, 5.0])).unwrap();
        assert_eq!(x, vec![5.0, 2.0]);
    }

    #[test]
    fn singular_detected() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(
            solve_direct(&LinearSystem::new(m, vec![1.0, 1.0])),
            Err(SolveError::Singular { .. })
        ));
        let m = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve_direct(&LinearSystem::new(m, vec![1.0, 1.0])).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, f64::NAN]]);
        assert!(matches!(
            solve_direct(&LinearSystem::new(m, vec![1.0, 1.0])),
            Err(SolveError::NonFinite("matrix"))
        ));
        let m = CsrMatrix::identity(2);
        assert!(matches!(
            solve_direct(&LinearSystem::new(m, vec![1.0, f64::INFINITY])),
            Err(SolveError::NonFinite(_))
        ));
    }
}
