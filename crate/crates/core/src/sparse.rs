//! Compressed sparse row matrices and a deterministic triplet builder.

use rayon::prelude::*;

/// Row-major compressed sparse matrix. Column indices are sorted within each
/// row and no explicit zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Unsorted coordinate-format accumulator. Duplicate entries are summed in
/// insertion order, so the result does not depend on how the triplets were
/// produced as long as the insertion order is fixed.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, val));
    }

    pub fn extend(&mut self, triplets: impl IntoIterator<Item = (usize, usize, f64)>) {
        self.entries.extend(triplets);
    }

    /// Copies `scale * m` into the block starting at (row_offset, col_offset).
    pub fn add_block(&mut self, m: &CsrMatrix, row_offset: usize, col_offset: usize, scale: f64) {
        self.entries.reserve(m.nnz());
        for (i, j, v) in m.iter() {
            self.push(row_offset + i, col_offset + j, scale * v);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(self) -> CsrMatrix {
        let Self {
            nrows,
            ncols,
            entries,
        } = self;
        // bucket by row, keeping insertion order
        let mut counts = vec![0usize; nrows + 1];
        for &(r, _, _) in &entries {
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut bucketed = vec![(0usize, 0.0f64); entries.len()];
        for &(r, c, v) in &entries {
            bucketed[next[r]] = (c, v);
            next[r] += 1;
        }
        drop(entries);

        let mut rows: Vec<Vec<(usize, f64)>> = (0..nrows)
            .into_par_iter()
            .map(|r| {
                let slice = &mut bucketed[counts[r]..counts[r + 1]].to_vec();
                // stable: equal columns keep insertion order
                slice.sort_by_key(|&(c, _)| c);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(slice.len());
                for &(c, v) in slice.iter() {
                    match merged.last_mut() {
                        Some((lc, lv)) if *lc == c => *lv += v,
                        _ => merged.push((c, v)),
                    }
                }
                merged.retain(|&(_, v)| v != 0.0);
                merged
            })
            .collect();

        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in rows.iter_mut() {
            for &(c, v) in row.iter() {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut b = TripletBuilder::new(rows.len(), ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                b.push(i, j, v);
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// y += alpha * A x
    pub fn mul_vec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let s: f64 = self.row(i).map(|(j, v)| v * x[j]).sum();
            *yi += alpha * s;
        }
    }

    /// xᵀ A y
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        (0..self.nrows)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>())
            .sum()
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for (i, j, v) in self.iter() {
            b.push(j, i, v);
        }
        b.build()
    }

    pub fn scaled(&self, s: f64) -> CsrMatrix {
        if s == 0.0 {
            return CsrMatrix::zeros(self.nrows, self.ncols);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        b.add_block(self, 0, 0, 1.0);
        b.add_block(other, 0, 0, s);
        b.build()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.iter() {
            d[i][j] = v;
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let mut b = TripletBuilder::new(2, 3);
        b.push(1, 2, 1.5);
        b.push(0, 0, 2.0);
        b.push(1, 2, -1.5);
        b.push(1, 0, 4.0);
        b.push(0, 0, 1.0);
        let m = b.build();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(1, 0), 4.0);
        assert_eq!(m.get(1, 2), 0.0);
        assert_eq!(m.row_ptr(), &[0, 1, 2]);
    }

    #[test]
    fn transpose_and_matvec() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0]);
        let t = m.transpose();
        assert_eq!(t.to_dense(), vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 3.0]]);
        assert_eq!(m.bilinear(&[1.0, 2.0], &[1.0, 0.0, 1.0]), 7.0);
        assert_eq!(m.norm_inf(), 3.0);
    }

    #[test]
    fn add_scaled_cancels() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 3.0]]);
        assert_eq!(m.add_scaled(-1.0, &m).nnz(), 0);
        assert_eq!(m.scaled(0.0).nnz(), 0);
    }
}
