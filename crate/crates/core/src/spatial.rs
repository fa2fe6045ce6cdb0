//! Periodic discrete Laplacians, spatial lifting of reaction tensors, and
//! the closed-form spectral norms of the Kronecker-sum operators.
//!
//! The domain is the unit interval/box with spacing `h = 1/n`, so the 1-D
//! stencil carries the prefactor `n² = 1/h²` and the d-dimensional operator
//! is the Kronecker sum of 1-D copies.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::reaction::{lex_decode, lex_index, CoefficientTensor, CoefficientTensors};
use crate::sparse::{CooMatrix, CsrMatrix};

/// Hard cap on `n^d` to keep Kronecker-sum assembly within memory.
const MAX_TOTAL_NODES: usize = 1 << 22;

/// Uniform periodic grid on the unit box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpatialGrid {
    n: usize,
    d: usize,
}

impl SpatialGrid {
    /// Builds a grid with `n >= 3` nodes per dimension and `1 <= d <= 3`.
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!(
                "grid needs n >= 3 nodes per dimension (periodic wrap double-counts below), got {n}"
            )));
        }
        if !(1..=3).contains(&d) {
            return Err(Error::Domain(format!("spatial dimension must be 1..=3, got {d}")));
        }
        let grid = Self { n, d };
        if grid.total_nodes() > MAX_TOTAL_NODES {
            return Err(Error::ResourceLimit(format!(
                "n^d = {} exceeds the node cap {MAX_TOTAL_NODES}",
                grid.total_nodes()
            )));
        }
        Ok(grid)
    }

    /// Nodes per dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Spatial dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Grid spacing `h = 1/n`.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Total node count `n_d = n^d`.
    pub fn total_nodes(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Coordinates of node `p` (0-based, row-major over dimensions),
    /// as `x_i = i/n` per dimension.
    pub fn coords(&self, p: usize) -> Vec<f64> {
        let mut rem = p;
        let mut out = vec![0.0; self.d];
        for slot in (0..self.d).rev() {
            out[slot] = (rem % self.n) as f64 / self.n as f64;
            rem /= self.n;
        }
        out
    }
}

/// A sparse discrete operator together with its symmetry flag.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    matrix: CsrMatrix,
    symmetric: bool,
}

impl DiscreteOperator {
    /// Wraps a matrix, recording whether it is symmetric by construction.
    pub fn new(matrix: CsrMatrix, symmetric: bool) -> Self {
        Self { matrix, symmetric }
    }

    /// Operator dimension (square).
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The underlying sparse matrix.
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Whether the operator was assembled symmetric.
    pub fn symmetric(&self) -> bool {
        self.symmetric
    }
}

/// 1-D periodic Laplacian `n²·circulant(-2, 1, …, 1)`.
pub fn laplacian_1d(n: usize) -> Result<DiscreteOperator> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "1-D periodic Laplacian needs n >= 3 (wrap-around double-counts at n = 2), got {n}"
        )));
    }
    let scale = (n * n) as f64;
    let mut coo = CooMatrix::new(n, n);
    for i in 0..n {
        coo.push(i, i, -2.0 * scale);
        coo.push(i, (i + 1) % n, scale);
        coo.push(i, (i + n - 1) % n, scale);
    }
    Ok(DiscreteOperator::new(coo.to_csr(), true))
}

/// d-dimensional periodic Laplacian as the Kronecker sum
/// `Σ_i I ⊗ … ⊗ D_h ⊗ … ⊗ I` over `n^d` nodes in row-major node ordering.
pub fn laplacian_nd(n: usize, d: usize) -> Result<DiscreteOperator> {
    let grid = SpatialGrid::new(n, d)?;
    let d1 = laplacian_1d(n)?;
    if d == 1 {
        return Ok(d1);
    }
    let total = grid.total_nodes();
    let mut acc = CooMatrix::new(total, total);
    for pos in 0..d {
        let left = CsrMatrix::identity(n.pow(pos as u32));
        let right = CsrMatrix::identity(n.pow((d - 1 - pos) as u32));
        let term = left.kron(d1.matrix()).kron(&right);
        for (r, c, v) in term.iter() {
            acc.push(r, c, v);
        }
    }
    Ok(DiscreteOperator::new(acc.to_csr(), true))
}

/// Eigenvalue of the periodic Laplacian at mode `k = (k_1, …, k_d)`:
/// `2n² Σ_i (cos(2π k_i / n) - 1)`.
pub fn laplacian_eigenvalue(n: usize, modes: &[usize]) -> f64 {
    let nf = n as f64;
    2.0 * nf
        * nf
        * modes
            .iter()
            .map(|&k| ((2.0 * core::f64::consts::PI * k as f64) / nf).cos() - 1.0)
            .sum::<f64>()
}

/// Closed-form spectral norm of the d-dimensional periodic Laplacian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianNorm {
    /// The attained maximum `max_k |2n² Σ_i (cos(2π k_i/n) - 1)|`.
    pub value: f64,
    /// Whether the supremum `4dn²` is attained (`n` even).
    pub bound_tight: bool,
}

/// Exact spectral norm of the periodic Laplacian: `4dn²` for even `n`; for
/// odd `n` the attained maximum `2dn²(1 + cos(π/n)) < 4dn²`.
pub fn laplacian_norm_exact(n: usize, d: usize) -> Result<LaplacianNorm> {
    if n < 3 {
        return Err(Error::Domain(format!("need n >= 3, got {n}")));
    }
    if !(1..=3).contains(&d) {
        return Err(Error::Domain(format!("spatial dimension must be 1..=3, got {d}")));
    }
    let nf = n as f64;
    let even = n % 2 == 0;
    // Each dimension contributes independently; the per-dimension maximum of
    // 1 - cos(2πk/n) sits at k = n/2 (even) or k = (n±1)/2 (odd).
    let per_dim = if even {
        4.0 * nf * nf
    } else {
        2.0 * nf * nf * (1.0 + (core::f64::consts::PI / nf).cos())
    };
    Ok(LaplacianNorm {
        value: d as f64 * per_dim,
        bound_tight: even,
    })
}

/// Block-diagonal linear coefficient operator with blocks `D_i Δ_h - μ_i I`
/// over species-major ordering (species block `i` holds all nodes).
pub fn build_f1(diffusion: &[f64], mu: &[f64], grid: &SpatialGrid) -> Result<DiscreteOperator> {
    if diffusion.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            expected: diffusion.len(),
            got: mu.len(),
        });
    }
    if let Some(bad) = diffusion.iter().find(|&&d| d < 0.0 || !d.is_finite()) {
        return Err(Error::Domain(format!("diffusion coefficients must be >= 0, got {bad}")));
    }
    let species = diffusion.len();
    let nd = grid.total_nodes();
    let lap = laplacian_nd(grid.n(), grid.d())?;
    let mut coo = CooMatrix::new(species * nd, species * nd);
    for (i, (&di, &mui)) in diffusion.iter().zip(mu).enumerate() {
        let off = i * nd;
        if di != 0.0 {
            coo.push_block(off, off, lap.matrix(), di);
        }
        coo.push_scaled_identity(off, off, nd, -mui);
    }
    Ok(DiscreteOperator::new(coo.to_csr(), true))
}

/// A reaction tensor lifted onto a grid: one copy of the base tensor per
/// node, each scaled by that node's rate factor.
#[derive(Debug, Clone)]
pub struct LiftedTensor {
    base: CoefficientTensor,
    grid: SpatialGrid,
    node_scales: Vec<f64>,
}

/// Lifts a node-local tensor onto the grid. `rates_per_node` supplies the
/// per-node rate scaling `c_r^{(p)}`; `None` means uniform unit scaling.
pub fn lift_tensor(
    base: &CoefficientTensor,
    grid: &SpatialGrid,
    rates_per_node: Option<&[f64]>,
) -> Result<LiftedTensor> {
    let node_scales = match rates_per_node {
        Some(scales) => {
            if scales.len() != grid.total_nodes() {
                return Err(Error::DimensionMismatch {
                    expected: grid.total_nodes(),
                    got: scales.len(),
                });
            }
            scales.to_vec()
        }
        None => vec![1.0; grid.total_nodes()],
    };
    Ok(LiftedTensor {
        base: base.clone(),
        grid: *grid,
        node_scales,
    })
}

impl LiftedTensor {
    /// The node-local base tensor.
    pub fn base(&self) -> &CoefficientTensor {
        &self.base
    }

    /// Per-node scale factors.
    pub fn node_scales(&self) -> &[f64] {
        &self.node_scales
    }

    /// Spectral norm of the lifted operator: `max_p |c^{(p)}| · ‖F‖₂`, since
    /// the node blocks are decoupled.
    pub fn two_norm(&self) -> Result<f64> {
        let scale = self.node_scales.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        Ok(scale * self.base.two_norm()?)
    }

    /// Materializes the lifted tensor as a sparse matrix acting on full
    /// Kronecker powers of the species-major state vector of length `S·n_d`.
    ///
    /// Row `(i-1)·n_d + p` receives the base entry `(i, ℓ)`, and the column is
    /// the lexicographic index of the node-local tuple with every species
    /// index shifted into the `p`-th node slot. Fails when `(S·n_d)^j`
    /// overflows the configured cap.
    pub fn materialize_full(&self, dim_cap: usize) -> Result<CsrMatrix> {
        let s = self.base.rows();
        let nd = self.grid.total_nodes();
        let big = s * nd;
        let order = self.base.order();
        let cols = checked_pow(big, order, dim_cap)?;
        let mut coo = CooMatrix::new(big, cols);
        for (p, &scale) in self.node_scales.iter().enumerate() {
            if scale == 0.0 {
                continue;
            }
            for &(r, c, v) in self.base.entries() {
                let local = lex_decode(c + 1, s, order);
                let global: Vec<usize> = local.iter().map(|&sp| (sp - 1) * nd + p + 1).collect();
                let col = lex_index(&global, big).expect("indices in range by construction");
                coo.push(r * nd + p, col - 1, scale * v);
            }
        }
        Ok(coo.to_csr())
    }
}

/// A reaction-diffusion system discretized on a periodic grid: node-local
/// coefficient tensors (sources, decay/coupling, higher-order reactions)
/// plus per-species diffusion applied through the grid Laplacian.
///
/// The state vector is species-major: species `i` occupies the contiguous
/// slice `i·n_d..(i+1)·n_d` over nodes.
#[derive(Debug, Clone)]
pub struct SpatialSystem {
    grid: SpatialGrid,
    diffusion: Vec<f64>,
    tensors: CoefficientTensors,
    laplacian: CsrMatrix,
}

impl SpatialSystem {
    /// Assembles the system, building the grid Laplacian once.
    pub fn new(grid: SpatialGrid, diffusion: Vec<f64>, tensors: CoefficientTensors) -> Result<Self> {
        if diffusion.len() != tensors.species() {
            return Err(Error::DimensionMismatch {
                expected: tensors.species(),
                got: diffusion.len(),
            });
        }
        if let Some(bad) = diffusion.iter().find(|&&d| d < 0.0 || !d.is_finite()) {
            return Err(Error::Domain(format!("diffusion coefficients must be >= 0, got {bad}")));
        }
        let laplacian = laplacian_nd(grid.n(), grid.d())?.matrix().clone();
        Ok(Self {
            grid,
            diffusion,
            tensors,
            laplacian,
        })
    }

    /// Number of species.
    pub fn species(&self) -> usize {
        self.tensors.species()
    }

    /// The grid.
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Per-species diffusion coefficients.
    pub fn diffusion(&self) -> &[f64] {
        &self.diffusion
    }

    /// Node-local coefficient tensors (including the source vector).
    pub fn tensors(&self) -> &CoefficientTensors {
        &self.tensors
    }

    /// The assembled grid Laplacian.
    pub fn laplacian(&self) -> &CsrMatrix {
        &self.laplacian
    }

    /// State dimension `S·n_d`.
    pub fn state_dim(&self) -> usize {
        self.species() * self.grid.total_nodes()
    }

    /// The spatial linear operator `F̃_1`: per-species diffusion blocks
    /// `D_i Δ_h` on the diagonal plus node-wise copies of the local linear
    /// coefficients.
    pub fn linear_operator(&self) -> CsrMatrix {
        let s = self.species();
        let nd = self.grid.total_nodes();
        let mut coo = CooMatrix::new(s * nd, s * nd);
        for (i, &di) in self.diffusion.iter().enumerate() {
            if di != 0.0 {
                coo.push_block(i * nd, i * nd, &self.laplacian, di);
            }
        }
        if let Some(f1) = self.tensors.tensor(1) {
            for &(row, col, v) in f1.entries() {
                coo.push_scaled_identity(row * nd, col * nd, nd, v);
            }
        }
        coo.to_csr()
    }

    /// The spatial source vector `F̃_0`, species-major.
    pub fn source_vector(&self) -> Vec<f64> {
        let nd = self.grid.total_nodes();
        let mut out = vec![0.0; self.state_dim()];
        for (i, &b) in self.tensors.source().iter().enumerate() {
            for p in 0..nd {
                out[i * nd + p] = b;
            }
        }
        out
    }

    /// Right-hand side of the nonlinear RDE at state `y` (species-major):
    /// node-local tensor evaluation plus diffusion.
    pub fn rhs(&self, y: &[f64], out: &mut [f64]) {
        let s = self.species();
        let nd = self.grid.total_nodes();
        debug_assert_eq!(y.len(), s * nd);
        debug_assert_eq!(out.len(), s * nd);
        // Diffusion per species.
        let mut column = vec![0.0; nd];
        for (i, &di) in self.diffusion.iter().enumerate() {
            let slice = &y[i * nd..(i + 1) * nd];
            if di != 0.0 {
                self.laplacian.matvec_into(slice, &mut column);
                for p in 0..nd {
                    out[i * nd + p] = di * column[p];
                }
            } else {
                for p in 0..nd {
                    out[i * nd + p] = 0.0;
                }
            }
        }
        // Node-local reactions.
        let mut local_y = vec![0.0; s];
        let mut local_rhs = vec![0.0; s];
        for p in 0..nd {
            for i in 0..s {
                local_y[i] = y[i * nd + p];
                local_rhs[i] = self.tensors.source()[i];
            }
            for tensor in self.tensors.tensors() {
                tensor.apply_power(&local_y, &mut local_rhs);
            }
            for i in 0..s {
                out[i * nd + p] += local_rhs[i];
            }
        }
    }
}

/// `base^order` guarded against overflow and a configured cap.
pub(crate) fn checked_pow(base: usize, order: usize, cap: usize) -> Result<usize> {
    let mut acc = 1usize;
    for _ in 0..order {
        acc = acc
            .checked_mul(base)
            .filter(|&v| v <= cap)
            .ok_or_else(|| {
                Error::ResourceLimit(format!("dimension {base}^{order} exceeds the cap {cap}"))
            })?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_1d_n3_matches_stencil() {
        let lap = laplacian_1d(3).unwrap();
        let dense = lap.matrix().to_dense();
        let expected = [[-2.0, 1.0, 1.0], [1.0, -2.0, 1.0], [1.0, 1.0, -2.0]];
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(dense[(r, c)], 9.0 * expected[r][c]);
            }
        }
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        for n in [3, 4, 7] {
            let lap = laplacian_1d(n).unwrap();
            for s in lap.matrix().row_sums() {
                assert!(s.abs() < 1e-9);
            }
        }
        let lap2 = laplacian_nd(4, 2).unwrap();
        for s in lap2.matrix().row_sums() {
            assert!(s.abs() < 1e-9);
        }
    }

    #[test]
    fn laplacian_rejects_small_n() {
        assert!(laplacian_1d(2).is_err());
        assert!(SpatialGrid::new(2, 1).is_err());
    }

    #[test]
    fn laplacian_is_symmetric() {
        assert_eq!(laplacian_nd(5, 2).unwrap().matrix().asymmetry(), 0.0);
    }

    #[test]
    fn nd_reduces_to_1d() {
        let a = laplacian_1d(5).unwrap();
        let b = laplacian_nd(5, 1).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn norm_exact_values() {
        assert_eq!(laplacian_norm_exact(4, 1).unwrap().value, 64.0);
        assert!(laplacian_norm_exact(4, 1).unwrap().bound_tight);
        // Odd n = 3: max at k = 1, 2·9·(1 - cos(2π/3)) = 27.
        let odd = laplacian_norm_exact(3, 1).unwrap();
        assert!((odd.value - 27.0).abs() < 1e-12);
        assert!(!odd.bound_tight);
        assert_eq!(laplacian_norm_exact(6, 3).unwrap().value, 432.0);
        assert_eq!(laplacian_norm_exact(4, 2).unwrap().value, 128.0);
    }

    #[test]
    fn eigenvalue_formula_is_consistent_with_norm() {
        for (n, d) in [(4usize, 2usize), (5, 2), (3, 3)] {
            let mut best = 0.0f64;
            let nd = n.pow(d as u32);
            for flat in 0..nd {
                let mut rem = flat;
                let mut modes = vec![0usize; d];
                for slot in (0..d).rev() {
                    modes[slot] = rem % n;
                    rem /= n;
                }
                best = best.max(laplacian_eigenvalue(n, &modes).abs());
            }
            let exact = laplacian_norm_exact(n, d).unwrap().value;
            assert!((best - exact).abs() <= 1e-9 * exact);
        }
    }

    #[test]
    fn build_f1_single_species_pure_decay() {
        let grid = SpatialGrid::new(4, 1).unwrap();
        let op = build_f1(&[0.0], &[2.5], &grid).unwrap();
        let dense = op.matrix().to_dense();
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { -2.5 } else { 0.0 };
                assert_eq!(dense[(r, c)], want);
            }
        }
    }

    #[test]
    fn build_f1_norm_bound() {
        let grid = SpatialGrid::new(6, 1).unwrap();
        let op = build_f1(&[1e-3, 5e-4], &[2.0, -1.0], &grid).unwrap();
        let est = op.matrix().spectral_norm_estimate(500, 1e-13);
        let bound = 4.0 * 1.0 * 36.0 * 1e-3 + 2.0;
        assert!(est <= bound + 1e-9, "estimate {est} > bound {bound}");
    }

    #[test]
    fn build_f1_norm_bound_randomized() {
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..12 {
            let n = 3 + (next() * 5.0) as usize;
            let d = 1 + (next() * 2.0) as usize;
            let grid = SpatialGrid::new(n, d).unwrap();
            let diffusion: Vec<f64> = (0..2).map(|_| next() * 1e-2).collect();
            let mu: Vec<f64> = (0..2).map(|_| next() * 6.0 - 3.0).collect();
            let op = build_f1(&diffusion, &mu, &grid).unwrap();
            let est = op.matrix().spectral_norm_estimate(500, 1e-13);
            let max_d = diffusion.iter().cloned().fold(0.0f64, f64::max);
            let max_mu = mu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bound = 4.0 * d as f64 * (n * n) as f64 * max_d + max_mu;
            assert!(est <= bound * (1.0 + 1e-9), "n={n} d={d}: {est} > {bound}");
        }
    }

    #[test]
    fn build_f1_block_norms_match_dense_eigensolver() {
        // Stable-regime parameters: each 50x50 block D_i Δ - μ_i I is
        // symmetric, so its spectral norm is max|D_i λ_k - μ_i| = 4n²D_i + μ_i
        // for even n; cross-check against a dense eigensolver per block.
        let grid = SpatialGrid::new(50, 1).unwrap();
        let diffusion = [1e-4, 5e-5];
        let mu = [5.0, 5.0];
        let lap = laplacian_1d(50).unwrap();
        for i in 0..2 {
            let mut dense = lap.matrix().to_dense() * diffusion[i];
            for k in 0..50 {
                dense[(k, k)] -= mu[i];
            }
            let eig = dense.symmetric_eigen();
            let oracle = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            let formula = 4.0 * 2500.0 * diffusion[i] + mu[i];
            assert!(
                (oracle - formula).abs() <= 1e-10 * formula,
                "block {i}: eig {oracle} vs formula {formula}"
            );
        }
        // The assembled operator's norm estimate stays within the joint bound.
        let op = build_f1(&diffusion, &mu, &grid).unwrap();
        let est = op.matrix().spectral_norm_estimate(500, 1e-13);
        assert!(est <= 4.0 * 2500.0 * 1e-4 + 5.0 + 1e-9);
    }

    #[test]
    fn lift_uniform_preserves_norm_and_single_node_identity() {
        let t = CoefficientTensor::from_entries(2, 2, [(1, 2, 1.5), (2, 3, -0.5)]).unwrap();
        let grid = SpatialGrid::new(4, 1).unwrap();
        let lifted = lift_tensor(&t, &grid, None).unwrap();
        assert!((lifted.two_norm().unwrap() - t.two_norm().unwrap()).abs() < 1e-13);

        // Non-uniform: scaling one node by 2 doubles the norm.
        let scales = [1.0, 2.0, 1.0, 1.0];
        let lifted2 = lift_tensor(&t, &grid, Some(&scales)).unwrap();
        assert!((lifted2.two_norm().unwrap() - 2.0 * t.two_norm().unwrap()).abs() < 1e-13);
    }

    #[test]
    fn materialized_lift_applies_nodewise() {
        // S = 1, quadratic self-reaction surrogate: F_2 = [c] at col 1.
        let t = CoefficientTensor::from_entries(1, 2, [(1, 1, 3.0)]).unwrap();
        let grid = SpatialGrid::new(3, 1).unwrap();
        let lifted = lift_tensor(&t, &grid, None).unwrap();
        let mat = lifted.materialize_full(1 << 20).unwrap();
        let y = [2.0, 5.0, 7.0];
        let y2 = crate::reaction::tensor_power(&y, 2);
        let out = mat.matvec(&y2).unwrap();
        assert_eq!(out, vec![12.0, 75.0, 147.0]);
    }
}
