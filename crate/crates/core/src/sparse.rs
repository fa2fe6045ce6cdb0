//! Minimal sparse-matrix kernels used across the toolkit.
//!
//! Matrices are assembled in a deterministic coordinate accumulator and
//! converted to compressed sparse row storage; the integrators are
//! matvec-dominated so CSR is the working format. Assembly order is fixed
//! (row-major over a `BTreeMap`) so repeated builds are bitwise identical.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};

/// Deterministic coordinate-format accumulator.
///
/// Duplicate `(row, col)` pushes are summed, matching the sum over reactions
/// in the tensor assembly formulas.
#[derive(Debug, Clone)]
pub struct CooMatrix {
    nrows: usize,
    ncols: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl CooMatrix {
    /// Creates an empty accumulator of the given shape.
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: BTreeMap::new(),
        }
    }

    /// Adds `value` at `(row, col)`, accumulating into any existing entry.
    ///
    /// # Panics
    /// Panics on out-of-bounds indices; assembly code controls its indices.
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.nrows && col < self.ncols, "COO index out of bounds");
        if value != 0.0 {
            *self.entries.entry((row, col)).or_insert(0.0) += value;
        }
    }

    /// Adds `scale * other` with its top-left corner at `(row0, col0)`.
    pub fn push_block(&mut self, row0: usize, col0: usize, other: &CsrMatrix, scale: f64) {
        for (r, c, v) in other.iter() {
            self.push(row0 + r, col0 + c, scale * v);
        }
    }

    /// Adds `scale * I_dim` with its top-left corner at `(row0, col0)`.
    pub fn push_scaled_identity(&mut self, row0: usize, col0: usize, dim: usize, scale: f64) {
        for i in 0..dim {
            self.push(row0 + i, col0 + i, scale);
        }
    }

    /// Converts to compressed sparse row storage. Entries that cancelled to
    /// exactly zero are kept out of the structure.
    pub fn to_csr(&self) -> CsrMatrix {
        let mut row_ptr = vec![0usize; self.nrows + 1];
        for (&(r, _), &v) in &self.entries {
            if v != 0.0 {
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..self.nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let nnz = row_ptr[self.nrows];
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for (&(_, c), &v) in &self.entries {
            if v != 0.0 {
                col_idx.push(c);
                values.push(v);
            }
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Compressed sparse row matrix over `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CooMatrix::new(nrows, ncols).to_csr()
    }

    /// Identity matrix of dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        let mut coo = CooMatrix::new(dim, dim);
        for i in 0..dim {
            coo.push(i, i, 1.0);
        }
        coo.to_csr()
    }

    /// Number of rows.
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Number of columns.
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates stored entries in row-major order as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` into a preallocated buffer (`y.len() == nrows`).
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    /// `y = A^T x`.
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.ncols];
        for r in 0..self.nrows {
            let xr = x[r];
            if xr == 0.0 {
                continue;
            }
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.col_idx[k]] += self.values[k] * xr;
            }
        }
        Ok(y)
    }

    /// Kronecker product `self ⊗ other` in lexicographic (row-major) ordering.
    pub fn kron(&self, other: &CsrMatrix) -> CsrMatrix {
        let mut coo = CooMatrix::new(self.nrows * other.nrows, self.ncols * other.ncols);
        for (r1, c1, v1) in self.iter() {
            for (r2, c2, v2) in other.iter() {
                coo.push(r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2);
            }
        }
        coo.to_csr()
    }

    /// Maximum absolute row sum (operator infinity norm).
    pub fn inf_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k].abs();
            }
            best = best.max(acc);
        }
        best
    }

    /// Maximum absolute column sum (operator 1-norm).
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0f64; self.ncols];
        for k in 0..self.values.len() {
            sums[self.col_idx[k]] += self.values[k].abs();
        }
        sums.into_iter().fold(0.0f64, f64::max)
    }

    /// Largest absolute deviation from symmetry, `max |A - A^T|`.
    pub fn asymmetry(&self) -> f64 {
        let mut at = CooMatrix::new(self.ncols, self.nrows);
        for (r, c, v) in self.iter() {
            at.push(c, r, v);
        }
        let at = at.to_csr();
        let mut dev = 0.0f64;
        let mut diff = CooMatrix::new(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            diff.push(r, c, v);
        }
        for (r, c, v) in at.iter() {
            diff.push(r, c, -v);
        }
        for (_, _, v) in diff.to_csr().iter() {
            dev = dev.max(v.abs());
        }
        dev
    }

    /// Row sums, one per row.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.values[k]).sum())
            .collect()
    }

    /// Dense copy; intended for small operators and test oracles.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    /// Lower bound on the spectral norm by power iteration on `A^T A`.
    ///
    /// Deterministic: fixed pseudo-random start vectors (a structured start
    /// can be exactly orthogonal to the dominant singular direction, e.g.
    /// alternating Laplacian modes on even grids), fixed iteration budget,
    /// converging to the dominant singular value from below.
    pub fn spectral_norm_estimate(&self, max_iters: usize, rel_tol: f64) -> f64 {
        if self.nnz() == 0 {
            return 0.0;
        }
        let mut best = 0.0f64;
        for seed in [0x9e3779b97f4a7c15u64, 0xbf58476d1ce4e5b9] {
            best = best.max(self.power_iterate(seed, max_iters, rel_tol));
        }
        best
    }

    fn power_iterate(&self, seed: u64, max_iters: usize, rel_tol: f64) -> f64 {
        let mut state = seed;
        let mut next = move || {
            // SplitMix64, mapped to [-1, 1].
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        };
        let mut v: Vec<f64> = (0..self.ncols).map(|_| next()).collect();
        if normalize(&mut v) == 0.0 {
            return 0.0;
        }
        let mut sigma_prev = 0.0f64;
        for _ in 0..max_iters {
            let av = self.matvec(&v).expect("dimension checked");
            let mut atav = self.matvec_transpose(&av).expect("dimension checked");
            let norm = normalize(&mut atav);
            if norm == 0.0 {
                return sigma_prev;
            }
            let sigma = norm.sqrt();
            v = atav;
            if (sigma - sigma_prev).abs() <= rel_tol * sigma.max(1e-300) {
                return sigma;
            }
            sigma_prev = sigma;
        }
        sigma_prev
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Euclidean norm of a slice.
pub fn two_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Infinity norm of a slice.
pub fn inf_norm_vec(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
