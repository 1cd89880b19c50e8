use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::HighPass;
use crate::phantom::GridSpec;
use crate::recon::LinearOperator;
use crate::scalar::Real;

/// Consecutive rows belonging to one receive coil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowBlock<T> {
    pub rows: usize,
    pub coil: usize,
    /// Sample rate when the block's times are uniform.
    pub sample_rate: Option<T>,
}

/// Sparse matrix in compressed-row form with a transposed copy for `Sᵀ y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrix<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<T>,
    // transpose
    t_ptr: Vec<usize>,
    t_idx: Vec<u32>,
    t_val: Vec<T>,
    pub grid: GridSpec<T>,
    pub hash: u64,
    pub blocks: Vec<RowBlock<T>>,
}

impl<T: Real> SystemMatrix<T> {
    /// Builds from per-row `(column, value)` lists; columns must be
    /// ascending within each row and zero values are dropped.
    pub fn from_rows(rows: Vec<Vec<(u32, T)>>, grid: GridSpec<T>, hash: u64, blocks: Vec<RowBlock<T>>) -> Result<Self> {
        let cols = grid.len();
        let nrows = rows.len();
        if blocks.iter().map(|b| b.rows).sum::<usize>() != nrows {
            return Err(Error::Config("row blocks do not cover the matrix".into()));
        }
        let nnz: usize = rows.iter().map(|r| r.iter().filter(|e| e.1 != T::zero()).count()).sum();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for r in rows {
            let mut last: Option<u32> = None;
            for (c, v) in r {
                if (c as usize) >= cols || last.is_some_and(|l| l >= c) {
                    return Err(Error::Domain(format!("column {c} out of order or range")));
                }
                last = Some(c);
                if v != T::zero() {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::finalize(nrows, cols, row_ptr, col_idx, values, grid, hash, blocks))
    }

    #[allow(clippy::too_many_arguments)]
    fn finalize(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        values: Vec<T>,
        grid: GridSpec<T>,
        hash: u64,
        blocks: Vec<RowBlock<T>>,
    ) -> Self {
        let mut counts = vec![0usize; cols + 1];
        for &c in &col_idx {
            counts[c as usize + 1] += 1;
        }
        for i in 0..cols {
            counts[i + 1] += counts[i];
        }
        let t_ptr = counts.clone();
        let mut fill = counts;
        let mut t_idx = vec![0u32; col_idx.len()];
        let mut t_val = vec![T::zero(); col_idx.len()];
        for r in 0..rows {
            for p in row_ptr[r]..row_ptr[r + 1] {
                let c = col_idx[p] as usize;
                t_idx[fill[c]] = r as u32;
                t_val[fill[c]] = values[p];
                fill[c] += 1;
            }
        }
        Self { rows, cols, row_ptr, col_idx, values, t_ptr, t_idx, t_val, grid, hash, blocks }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn density(&self) -> f64 {
        self.nnz() as f64 / (self.rows as f64 * self.cols as f64)
    }

    /// Stored `(column, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()].iter().map(|&c| c as usize).zip(self.values[range].iter().copied())
    }

    /// All stored entries as `(row, column, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&(c as u32)) {
            Ok(p) => self.values[range.start + p],
            Err(_) => T::zero(),
        }
    }

    /// `y = S x`, each row summed in ascending column order.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        y.par_iter_mut().enumerate().with_min_len(64).for_each(|(r, out)| {
            let mut acc = T::zero();
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.col_idx[p] as usize];
            }
            *out = acc;
        });
    }

    /// `x = Sᵀ y`, each column summed in ascending row order.
    pub fn rmatvec(&self, y: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.cols];
        self.rmatvec_into(y, &mut x);
        x
    }

    pub fn rmatvec_into(&self, y: &[T], x: &mut [T]) {
        assert_eq!(y.len(), self.rows);
        assert_eq!(x.len(), self.cols);
        x.par_iter_mut().enumerate().with_min_len(64).for_each(|(c, out)| {
            let mut acc = T::zero();
            for p in self.t_ptr[c]..self.t_ptr[c + 1] {
                acc += self.t_val[p] * y[self.t_idx[p] as usize];
            }
            *out = acc;
        });
    }

    /// Dense copy, row-major. Intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// High-pass filters for each row block (uniform blocks only).
    pub fn block_filters(&self, cutoff: T) -> Result<Vec<HighPass<T>>> {
        self.blocks
            .iter()
            .map(|b| {
                let fs = b
                    .sample_rate
                    .ok_or_else(|| Error::Unsupported("high-pass filtering needs uniformly sampled rows".into()))?;
                Ok(HighPass::new(b.rows, fs, cutoff))
            })
            .collect()
    }
}

impl<T: Real> LinearOperator<T> for SystemMatrix<T> {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.matvec_into(x, y)
    }

    fn apply_transpose(&self, y: &[T], x: &mut [T]) {
        self.rmatvec_into(y, x)
    }
}

/// `H S` with `H` the per-block high-pass, applied on the fly.
///
/// `H` is a real symmetric projector (its DFT mask is conjugate-symmetric),
/// so `(H S)ᵀ = Sᵀ H`.
#[derive(Debug, Clone)]
pub struct FilteredOperator<'a, T: Real> {
    matrix: &'a SystemMatrix<T>,
    filters: Vec<HighPass<T>>,
}

impl<'a, T: Real> FilteredOperator<'a, T> {
    pub fn new(matrix: &'a SystemMatrix<T>, cutoff: T) -> Result<Self> {
        Ok(Self { filters: matrix.block_filters(cutoff)?, matrix })
    }

    /// Filters a stacked data vector block by block.
    pub fn filter(&self, y: &mut [T]) {
        let mut start = 0;
        for f in &self.filters {
            f.apply(&mut y[start..start + f.len()]);
            start += f.len();
        }
    }
}

impl<T: Real> LinearOperator<T> for FilteredOperator<'_, T> {
    fn rows(&self) -> usize {
        self.matrix.rows
    }

    fn cols(&self) -> usize {
        self.matrix.cols
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.matrix.matvec_into(x, y);
        self.filter(y);
    }

    fn apply_transpose(&self, y: &[T], x: &mut [T]) {
        let mut z = y.to_vec();
        self.filter(&mut z);
        self.matrix.rmatvec_into(&z, x);
    }
}

/// Materializes `H S`: every column's time series filtered per coil block.
/// The result is generally dense; prefer [`FilteredOperator`] for large systems.
pub fn apply_highpass_rows<T: Real>(s: &SystemMatrix<T>, cutoff: T) -> Result<SystemMatrix<T>> {
    let filters = s.block_filters(cutoff)?;
    if filters.iter().all(|f| f.is_identity()) {
        return Ok(s.clone());
    }
    // filtered columns, column-major dense per block
    let columns: Vec<Vec<T>> = (0..s.cols)
        .into_par_iter()
        .map(|c| {
            let mut col = vec![T::zero(); s.rows];
            for p in s.t_ptr[c]..s.t_ptr[c + 1] {
                col[s.t_idx[p] as usize] = s.t_val[p];
            }
            let mut start = 0;
            for f in &filters {
                f.apply(&mut col[start..start + f.len()]);
                start += f.len();
            }
            col
        })
        .collect();
    let rows: Vec<Vec<(u32, T)>> = (0..s.rows)
        .map(|r| (0..s.cols).map(|c| (c as u32, columns[c][r])).filter(|e| e.1 != T::zero()).collect())
        .collect();
    let mut h = crate::sysmat::ConfigHasher::new();
    h.u64(s.hash).str("highpass").real(cutoff);
    SystemMatrix::from_rows(rows, s.grid, h.finish(), s.blocks.clone())
}
