//! Anderson acceleration of a fixed-point map g.
//!
//! The history keeps the last `depth + 1` pairs (x_{j-1}, g(x_{j-1})), with
//! update steps w_j = g(x_{j-1}) − x_{j-1}. The coefficients minimize
//!
//!   ‖(1 − Σα_j) w_k + Σ α_j w_j‖
//!
//! which, with d_j = w_j − w_k, is the least-squares problem
//! min ‖w_k + Σ α_j d_j‖ solved through its Gram normal equations.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Gram condition estimate above which the oldest column is dropped.
pub const GRAM_CONDITION_LIMIT: f64 = 1e10;
/// Tikhonov shift relative to trace(G) for a numerically singular Gram matrix.
pub const TIKHONOV_SHIFT: f64 = 1e-12;

pub trait InnerProduct {
    fn dot(&self, a: &[f64], b: &[f64]) -> f64;

    fn norm(&self, a: &[f64]) -> f64 {
        self.dot(a, a).max(0.0).sqrt()
    }
}

/// Plain ℓ² inner product.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl InnerProduct for Euclidean {
    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AndersonError {
    #[error("at least two stored updates are needed, have {0}")]
    InsufficientHistory(usize),
}

#[derive(Debug, Clone)]
struct Entry {
    x: Vec<f64>,
    gx: Vec<f64>,
    w: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AndersonHistory {
    depth: usize,
    entries: VecDeque<Entry>,
}

/// Mixing coefficients for the stored updates, oldest first, excluding the
/// newest update whose weight is `1 − Σα`.
#[derive(Debug, Clone, PartialEq)]
pub struct AndersonCoefficients {
    pub alpha: Vec<f64>,
    /// Minimized value ‖(1 − Σα) w_k + Σ α_j w_j‖.
    pub objective: f64,
    /// ‖w_k‖, the objective at α = 0.
    pub newest_norm: f64,
    /// Columns dropped by the conditioning safeguard.
    pub pruned: usize,
}

impl AndersonHistory {
    pub fn new(depth: usize) -> Self {
        Self {
            depth,
            entries: VecDeque::with_capacity(depth + 1),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Records x and its image g(x), evicting the oldest pair beyond depth+1.
    pub fn push(&mut self, x: Vec<f64>, gx: Vec<f64>) {
        assert_eq!(x.len(), gx.len());
        if let Some(first) = self.entries.front() {
            assert_eq!(first.x.len(), x.len(), "history vectors must share a length");
        }
        let w = gx.iter().zip(&x).map(|(g, x)| g - x).collect();
        self.entries.push_back(Entry { x, gx, w });
        while self.entries.len() > self.depth + 1 {
            self.entries.pop_front();
        }
    }

    /// Stored update steps, oldest first.
    pub fn updates(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.iter().map(|e| e.w.as_slice())
    }

    /// Stored pre-images x_{j-1}, oldest first.
    pub fn iterates(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.iter().map(|e| e.x.as_slice())
    }

    /// Gram matrix ⟨w_i, w_j⟩ of the stored updates.
    pub fn gram(&self, ip: &dyn InnerProduct) -> DMatrix<f64> {
        let k = self.entries.len();
        DMatrix::from_fn(k, k, |i, j| ip.dot(&self.entries[i].w, &self.entries[j].w))
    }

    /// Reorders the stored pairs; only used to check order invariance.
    #[doc(hidden)]
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            depth: self.depth,
            entries: order.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }
}

/// Solves the Anderson least-squares problem for the current history.
///
/// The newest stored update is w_k; all older ones (at most `depth`) enter
/// the minimization.
pub fn anderson_coefficients(
    hist: &AndersonHistory,
    ip: &dyn InnerProduct,
) -> Result<AndersonCoefficients, AndersonError> {
    let len = hist.entries.len();
    if len < 2 {
        return Err(AndersonError::InsufficientHistory(len));
    }
    let newest = &hist.entries[len - 1].w;
    let newest_norm = ip.norm(newest);
    let older: Vec<&[f64]> = hist.entries.iter().take(len - 1).map(|e| e.w.as_slice()).collect();
    let diffs: Vec<Vec<f64>> = older
        .iter()
        .map(|w| w.iter().zip(newest).map(|(a, b)| a - b).collect())
        .collect();
    let m = diffs.len();
    let full_gram = DMatrix::from_fn(m, m, |i, j| ip.dot(&diffs[i], &diffs[j]));
    let full_rhs = DVector::from_fn(m, |i, _| -ip.dot(&diffs[i], newest));

    // Keep the newest `cols` differences; drop the oldest while ill-conditioned.
    let mut first = 0;
    let alpha_active = loop {
        let k = m - first;
        let g = full_gram.view((first, first), (k, k)).into_owned();
        let rhs = full_rhs.rows(first, k).into_owned();
        let eig = g.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.max();
        let lmin = eig.eigenvalues.min();
        if !(lmax > 0.0) {
            break DVector::zeros(k);
        }
        let cond = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
        if cond > GRAM_CONDITION_LIMIT && k > 1 {
            first += 1;
            continue;
        }
        let mut g = g;
        if cond > GRAM_CONDITION_LIMIT {
            let shift = TIKHONOV_SHIFT * g.trace();
            for i in 0..k {
                g[(i, i)] += shift;
            }
        }
        let sol = match g.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => g.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(k)),
        };
        break sol;
    };

    let mut alpha = vec![0.0; m];
    for (i, a) in alpha_active.iter().enumerate() {
        alpha[first + i] = *a;
    }
    let mut mixed = newest.clone();
    for (a, d) in alpha.iter().zip(&diffs) {
        for (r, di) in mixed.iter_mut().zip(d) {
            *r += a * di;
        }
    }
    let mut objective = ip.norm(&mixed);
    // α = 0 is always feasible; never return something worse.
    if !(objective <= newest_norm * (1.0 + 1e-12)) || alpha.iter().any(|a| !a.is_finite()) {
        alpha.iter_mut().for_each(|a| *a = 0.0);
        objective = newest_norm;
    }
    Ok(AndersonCoefficients {
        alpha,
        objective,
        newest_norm,
        pruned: first,
    })
}

/// Anderson-mixed iterate
/// `(1 − Σα_j) g(x_{k-1}) + Σ α_j g(x_{j-1})`.
///
/// With depth 0 or a single stored pair this returns the newest image
/// g(x_{k-1}) itself, bit for bit.
pub fn anderson_mix(
    hist: &AndersonHistory,
    ip: &dyn InnerProduct,
) -> (Vec<f64>, Option<AndersonCoefficients>) {
    let newest = hist.entries.back().expect("anderson_mix on empty history");
    if hist.depth == 0 || hist.entries.len() < 2 {
        return (newest.gx.clone(), None);
    }
    let coeffs = anderson_coefficients(hist, ip).expect("history has two entries");
    let weights = mixing_weights(&coeffs.alpha);
    let mut out = vec![0.0; newest.gx.len()];
    for (w, e) in weights.iter().zip(&hist.entries) {
        if *w != 0.0 {
            for (o, g) in out.iter_mut().zip(&e.gx) {
                *o += w * g;
            }
        }
    }
    (out, Some(coeffs))
}

/// Weights on every stored image, oldest first; they sum to one.
pub(crate) fn mixing_weights(alpha: &[f64]) -> Vec<f64> {
    let mut w = alpha.to_vec();
    w.push(1.0 - alpha.iter().sum::<f64>());
    w
}
