//! Truncated Carleman embedding of the discretized polynomial RDE.
//!
//! The embedding introduces blocks `Z_i = Ỹ^{⊗i}` whose dynamics follow from
//! the Leibniz rule; truncation at order `k` yields the block upper-triangular
//! system `dZ/dt = M_k Z + 𝓑` with the inhomogeneous term kept outside the
//! transfer matrix (only the first block of `𝓑` is populated).
//!
//! Two representations are first-class:
//!
//! * `Full` — the exact embedding over Kronecker powers of the full spatial
//!   state; block `i` has dimension `(S·n_d)^i`. Exact but only tractable at
//!   tiny grids; used for correctness checks of the embedding identity.
//! * `Grouped` — node-local monomials only (species tensor powers times
//!   `n_d`); block `i` has dimension `S^i·n_d`. This is the representation
//!   behind the numerical experiments. Diffusion of a product of fields is
//!   not exactly a matrix on grouped monomials, so the grouped system is an
//!   approximation whose empirical error the experiments measure.
//!
//! Block indexing: `transfer_block(system, i, j)` is the Leibniz lift of the
//! order-`j` coefficient `F̃_j` over `i` slots; it couples `Z_{i+j-1}` into
//! `dZ_i/dt`, so the `j = 1` (linear) block sits on the diagonal.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::reaction::{lex_decode, tensor_power};
use crate::sparse::{CooMatrix, CsrMatrix};
use crate::spatial::{checked_pow, lift_tensor, SpatialSystem};

/// Default cap on the total Carleman dimension (full mode explodes fast).
pub const DEFAULT_DIM_CAP: usize = 1_000_000;

/// Which monomial basis the embedding uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarlemanRepr {
    /// Exact Kronecker powers of the full spatial state.
    Full,
    /// Node-local species monomials only.
    Grouped,
}

impl CarlemanRepr {
    /// Dimension of Carleman block `i` (1-based).
    pub fn block_dim(&self, species: usize, nodes: usize, i: usize, cap: usize) -> Result<usize> {
        match self {
            CarlemanRepr::Full => checked_pow(species * nodes, i, cap),
            CarlemanRepr::Grouped => {
                let pow = checked_pow(species, i, cap)?;
                pow.checked_mul(nodes)
                    .filter(|&v| v <= cap)
                    .ok_or_else(|| Error::ResourceLimit(format!("grouped block {i} exceeds cap {cap}")))
            }
        }
    }
}

/// Assembled truncated Carleman system `dZ/dt = M Z + b`.
#[derive(Debug, Clone)]
pub struct CarlemanSystem {
    k: usize,
    repr: CarlemanRepr,
    matrix: CsrMatrix,
    b: Vec<f64>,
    block_offsets: Vec<usize>,
    species: usize,
    nodes: usize,
}

impl CarlemanSystem {
    /// Wraps an arbitrary square linear system `dZ/dt = M Z + b` as a
    /// single-block system so the shared linear integrator can drive it.
    pub fn from_raw_parts(matrix: CsrMatrix, b: Vec<f64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "matrix must be square");
        assert_eq!(matrix.nrows(), b.len(), "b must match the matrix dimension");
        let dim = matrix.nrows();
        Self {
            k: 1,
            repr: CarlemanRepr::Full,
            matrix,
            b,
            block_offsets: alloc::vec![0, dim],
            species: 1,
            nodes: dim,
        }
    }

    /// Truncation order `k`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Representation mode.
    pub fn repr(&self) -> CarlemanRepr {
        self.repr
    }

    /// The sparse transfer matrix `M_k`.
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// The inhomogeneous vector `𝓑 = F̃_0 ⊕ 0`.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Offsets of each block: `block_offsets[i-1]..block_offsets[i]` is block `i`.
    pub fn block_offsets(&self) -> &[usize] {
        &self.block_offsets
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        *self.block_offsets.last().unwrap_or(&0)
    }

    /// First-block extraction: the approximation to `Ỹ`.
    pub fn extract<'a>(&self, z: &'a [f64]) -> Result<&'a [f64]> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(&z[..self.block_offsets[1]])
    }

    /// Number of nonzero entries stored in `M_k`.
    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Per-block-pair nonzero counts `(block_row, block_col, nnz)`,
    /// block indices 1-based, sorted.
    pub fn block_pattern(&self) -> Vec<(usize, usize, usize)> {
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (r, c, _) in self.matrix.iter() {
            let br = block_of(&self.block_offsets, r);
            let bc = block_of(&self.block_offsets, c);
            *counts.entry((br, bc)).or_insert(0) += 1;
        }
        counts.into_iter().map(|((r, c), n)| (r, c, n)).collect()
    }

    /// Checks that every block strictly below the diagonal is empty.
    pub fn is_block_upper_triangular(&self) -> bool {
        self.block_pattern().iter().all(|&(r, c, _)| c >= r)
    }

    /// Number of species `S`.
    pub fn species(&self) -> usize {
        self.species
    }

    /// Number of grid nodes `n_d`.
    pub fn nodes(&self) -> usize {
        self.nodes
    }
}

fn block_of(offsets: &[usize], idx: usize) -> usize {
    match offsets.binary_search(&idx) {
        Ok(i) => i + 1,
        Err(i) => i,
    }
}

/// Leibniz transfer block `B_j^i = Σ_{v=1..i} I^{⊗(v-1)} ⊗ F̃_j ⊗ I^{⊗(i-v)}`
/// for the order-`j` coefficient of the system (`0 <= j <= ς`).
///
/// Satisfies `B_j^i = B_j^1 ⊗ I^{⊗(i-1)} + I ⊗ B_j^{i-1}` in full mode.
pub fn transfer_block(
    system: &SpatialSystem,
    i: usize,
    j: usize,
    repr: CarlemanRepr,
) -> Result<CsrMatrix> {
    transfer_block_capped(system, i, j, repr, DEFAULT_DIM_CAP)
}

/// [`transfer_block`] with an explicit dimension cap.
pub fn transfer_block_capped(
    system: &SpatialSystem,
    i: usize,
    j: usize,
    repr: CarlemanRepr,
    cap: usize,
) -> Result<CsrMatrix> {
    if i < 1 {
        return Err(Error::Domain("Leibniz index i must be >= 1".into()));
    }
    let s = system.species();
    let nd = system.grid().total_nodes();
    let rows = repr.block_dim(s, nd, i, cap)?;
    let cols = if i + j >= 1 {
        match repr {
            CarlemanRepr::Full => checked_pow(s * nd, i + j - 1, cap)?,
            CarlemanRepr::Grouped => checked_pow(s, i + j - 1, cap)? * nd,
        }
    } else {
        0
    };
    match repr {
        CarlemanRepr::Full => {
            let fj = full_coefficient(system, j, cap)?;
            let n = s * nd;
            let mut acc = CooMatrix::new(rows, cols);
            for v in 0..i {
                let left = CsrMatrix::identity(checked_pow(n, v, cap)?);
                let right = CsrMatrix::identity(checked_pow(n, i - 1 - v, cap)?);
                let term = left.kron(&fj).kron(&right);
                for (r, c, val) in term.iter() {
                    acc.push(r, c, val);
                }
            }
            Ok(acc.to_csr())
        }
        CarlemanRepr::Grouped => {
            let mut acc = CooMatrix::new(rows, cols);
            push_grouped_block(system, i, j, &mut acc)?;
            Ok(acc.to_csr())
        }
    }
}

/// The spatial coefficient `F̃_j` as a sparse matrix over the species-major
/// state (`j = 0` gives the source as an `S·n_d × 1` column).
fn full_coefficient(system: &SpatialSystem, j: usize, cap: usize) -> Result<CsrMatrix> {
    let s = system.species();
    let nd = system.grid().total_nodes();
    let n = s * nd;
    match j {
        0 => {
            let mut coo = CooMatrix::new(n, 1);
            for (idx, &v) in system.source_vector().iter().enumerate() {
                coo.push(idx, 0, v);
            }
            Ok(coo.to_csr())
        }
        1 => Ok(system.linear_operator()),
        _ => match system.tensors().tensor(j) {
            Some(t) => lift_tensor(t, system.grid(), None)?.materialize_full(cap),
            None => Ok(CsrMatrix::zeros(n, checked_pow(n, j, cap)?)),
        },
    }
}

/// Adds the grouped-mode Leibniz block for coefficient order `j` at Leibniz
/// index `i` into `acc` (which must already have the block shape).
fn push_grouped_block(system: &SpatialSystem, i: usize, j: usize, acc: &mut CooMatrix) -> Result<()> {
    let s = system.species();
    let nd = system.grid().total_nodes();
    let row_tuples = s.pow(i as u32);
    // Species-level linear blocks are delta_ab·D_a Δ + F1_local[a, b]·I;
    // higher orders contribute scalar multiples of the node identity.
    let mut digits = vec![0usize; i];
    for row_idx in 0..row_tuples {
        decode_digits(row_idx, s, &mut digits);
        for v in 0..i {
            let a = digits[v];
            match j {
                0 => {
                    let b = system.tensors().source()[a];
                    if b == 0.0 {
                        continue;
                    }
                    let col_idx = remove_digit(&digits, v, s);
                    acc.push_scaled_identity(row_idx * nd, col_idx * nd, nd, b);
                }
                1 => {
                    // Diffusion block on the species diagonal.
                    let di = system.diffusion()[a];
                    if di != 0.0 {
                        acc.push_block(row_idx * nd, row_idx * nd, system.laplacian(), di);
                    }
                    if let Some(f1) = system.tensors().tensor(1) {
                        for &(row, col, val) in f1.entries() {
                            if row != a {
                                continue;
                            }
                            let col_idx = replace_digit(&digits, v, col, s);
                            acc.push_scaled_identity(row_idx * nd, col_idx * nd, nd, val);
                        }
                    }
                }
                _ => {
                    if let Some(fj) = system.tensors().tensor(j) {
                        for &(row, col, val) in fj.entries() {
                            if row != a {
                                continue;
                            }
                            let col_idx = splice_digits(&digits, v, col, j, s);
                            acc.push_scaled_identity(row_idx * nd, col_idx * nd, nd, val);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn decode_digits(mut idx: usize, base: usize, out: &mut [usize]) {
    for slot in (0..out.len()).rev() {
        out[slot] = idx % base;
        idx /= base;
    }
}

fn encode_digits(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0usize, |acc, &d| acc * base + d)
}

fn replace_digit(digits: &[usize], v: usize, new: usize, base: usize) -> usize {
    let mut tmp: Vec<usize> = digits.to_vec();
    tmp[v] = new;
    encode_digits(&tmp, base)
}

fn remove_digit(digits: &[usize], v: usize, base: usize) -> usize {
    let mut tmp: Vec<usize> = Vec::with_capacity(digits.len() - 1);
    tmp.extend_from_slice(&digits[..v]);
    tmp.extend_from_slice(&digits[v + 1..]);
    encode_digits(&tmp, base)
}

/// Replaces slot `v` by the `j` digits of tensor column `col` (0-based).
fn splice_digits(digits: &[usize], v: usize, col: usize, j: usize, base: usize) -> usize {
    let local = lex_decode(col + 1, base, j);
    let mut tmp: Vec<usize> = Vec::with_capacity(digits.len() + j - 1);
    tmp.extend_from_slice(&digits[..v]);
    tmp.extend(local.iter().map(|&d| d - 1));
    tmp.extend_from_slice(&digits[v + 1..]);
    encode_digits(&tmp, base)
}

/// Assembles the truncated system with the default dimension cap.
pub fn assemble(system: &SpatialSystem, k: usize, repr: CarlemanRepr) -> Result<CarlemanSystem> {
    assemble_with_cap(system, k, repr, DEFAULT_DIM_CAP)
}

/// Assembles `M_k` and `𝓑` with an explicit total-dimension cap.
pub fn assemble_with_cap(
    system: &SpatialSystem,
    k: usize,
    repr: CarlemanRepr,
    cap: usize,
) -> Result<CarlemanSystem> {
    if k < 1 {
        return Err(Error::Domain("truncation order k must be >= 1".into()));
    }
    let s = system.species();
    let nd = system.grid().total_nodes();
    let varsigma = system.tensors().max_order().max(1);
    let mut offsets = vec![0usize];
    for i in 1..=k {
        let dim = repr.block_dim(s, nd, i, cap)?;
        let next = offsets[i - 1]
            .checked_add(dim)
            .filter(|&v| v <= cap)
            .ok_or_else(|| {
                Error::ResourceLimit(format!("Carleman dimension exceeds the cap {cap}"))
            })?;
        offsets.push(next);
    }
    let total = offsets[k];
    let mut acc = CooMatrix::new(total, total);
    for i in 1..=k {
        for j in 1..=varsigma {
            let col_block = i + j - 1;
            if col_block > k {
                break;
            }
            let block = transfer_block_capped(system, i, j, repr, cap)?;
            for (r, c, v) in block.iter() {
                acc.push(offsets[i - 1] + r, offsets[col_block - 1] + c, v);
            }
        }
    }
    let mut b = vec![0.0; total];
    b[..s * nd].copy_from_slice(&system.source_vector());
    Ok(CarlemanSystem {
        k,
        repr,
        matrix: acc.to_csr(),
        b,
        block_offsets: offsets,
        species: s,
        nodes: nd,
    })
}

/// Initial Carleman state `Z(0)`: concatenated monomials of `y0` per block.
pub fn embed(y0: &[f64], species: usize, nodes: usize, k: usize, repr: CarlemanRepr) -> Result<Vec<f64>> {
    embed_with_cap(y0, species, nodes, k, repr, DEFAULT_DIM_CAP)
}

/// [`embed`] with an explicit dimension cap.
pub fn embed_with_cap(
    y0: &[f64],
    species: usize,
    nodes: usize,
    k: usize,
    repr: CarlemanRepr,
    cap: usize,
) -> Result<Vec<f64>> {
    if y0.len() != species * nodes {
        return Err(Error::DimensionMismatch {
            expected: species * nodes,
            got: y0.len(),
        });
    }
    let mut z = Vec::new();
    match repr {
        CarlemanRepr::Full => {
            for i in 1..=k {
                checked_pow(species * nodes, i, cap)?;
                z.extend(tensor_power(y0, i));
            }
        }
        CarlemanRepr::Grouped => {
            let mut digits = vec![0usize; 1];
            for i in 1..=k {
                let tuples = checked_pow(species, i, cap)?;
                digits.resize(i, 0);
                for idx in 0..tuples {
                    decode_digits(idx, species, &mut digits);
                    for p in 0..nodes {
                        let mut prod = 1.0;
                        for &sp in digits.iter() {
                            prod *= y0[sp * nodes + p];
                        }
                        z.push(prod);
                    }
                }
            }
        }
    }
    Ok(z)
}

/// Which reaction-norm chain the Carleman norm bound uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormBoundKind {
    /// `Σ_j C_max,j √(σ_max,j τ_max,j)` from the assembled tensors.
    General,
    /// Pure autocatalytic simplification `√(2(2S-1)) Σ_j C_max,j`.
    Autocatalytic,
}

/// Norm bound `k·[4dn² max_i D_i + max_i |μ_i| + Σ_{j≥2} C_max,j s_j]` on
/// `‖M_k‖₂`; the linear part uses `√(‖F_1‖₁‖F_1‖_∞)` of the local linear
/// coefficients, which reduces to `max|μ|` for pure decay.
pub fn norm_bound(system: &SpatialSystem, k: usize, kind: NormBoundKind) -> f64 {
    let grid = system.grid();
    let max_d = system.diffusion().iter().cloned().fold(0.0f64, f64::max);
    let lap_part = 4.0 * grid.d() as f64 * (grid.n() * grid.n()) as f64 * max_d;
    let mu_part = match system.tensors().tensor(1) {
        Some(f1) => (f1.one_norm() * f1.inf_norm()).sqrt(),
        None => 0.0,
    };
    let s = system.species() as f64;
    let reaction_part: f64 = system
        .tensors()
        .tensors()
        .iter()
        .filter(|t| t.order() >= 2)
        .map(|t| {
            let data = t.bound_data();
            match kind {
                NormBoundKind::General => data.two_bound(),
                NormBoundKind::Autocatalytic => data.c_max * (2.0 * (2.0 * s - 1.0)).sqrt(),
            }
        })
        .sum();
    k as f64 * (lap_part + mu_part + reaction_part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reaction::{CoefficientTensor, CoefficientTensors, ReactionNetwork};
    use crate::spatial::SpatialGrid;
    use alloc::vec;

    /// GM-shaped linear+cubic system with general linear coupling scalars.
    fn coupled_system(n: usize, gamma: f64, eta: f64, c1: f64) -> SpatialSystem {
        let grid = SpatialGrid::new(n, 1).unwrap();
        let network = ReactionNetwork::new(2, vec![]).unwrap();
        let mut tensors = CoefficientTensors::from_network(&network).unwrap();
        // Hand-built local tensors: F1 = [[-mu1, gamma], [eta, -mu2]],
        // F3 with +c1/-c1 at the y1^2 y2 column.
        let f1 = CoefficientTensor::from_entries(
            2,
            1,
            [(1, 1, -5.0), (1, 2, gamma), (2, 1, eta), (2, 2, -5.0)],
        )
        .unwrap();
        let f2 = CoefficientTensor::zero(2, 2);
        let f3 = CoefficientTensor::from_entries(2, 3, [(1, 2, c1), (2, 2, -c1)]).unwrap();
        tensors = tensors.with_source(vec![1.0, 0.0]).unwrap();
        let tensors = CoefficientTensorsBuilder {
            species: 2,
            source: tensors.source().to_vec(),
            tensors: vec![f1, f2, f3],
        }
        .build();
        SpatialSystem::new(grid, vec![1e-4, 5e-5], tensors).unwrap()
    }

    /// Test-only constructor bypassing network assembly.
    struct CoefficientTensorsBuilder {
        species: usize,
        source: Vec<f64>,
        tensors: Vec<CoefficientTensor>,
    }

    impl CoefficientTensorsBuilder {
        fn build(self) -> CoefficientTensors {
            CoefficientTensors::from_parts(self.species, self.source, self.tensors).unwrap()
        }
    }

    #[test]
    fn grouped_linear_lift_block_structure() {
        // B(F1, i=2) must equal the 4x4 species-pair block matrix
        // [[2β, γ, γ, 0], [η, β+κ, 0, γ], [η, 0, β+κ, γ], [0, η, η, 2κ]].
        let n = 3;
        let sys = coupled_system(n, 0.7, -0.3, 1.0);
        let block = transfer_block(&sys, 2, 1, CarlemanRepr::Grouped).unwrap().to_dense();
        let nd = n;
        let lap = sys.laplacian().to_dense();
        let i_nd = nalgebra::DMatrix::<f64>::identity(nd, nd);
        let beta = 1e-4 * &lap - 5.0 * &i_nd;
        let kappa = 5e-5 * &lap - 5.0 * &i_nd;
        let gamma = 0.7 * &i_nd;
        let eta = -0.3 * &i_nd;
        let zero = nalgebra::DMatrix::<f64>::zeros(nd, nd);
        let expected_blocks = [
            [&beta + &beta, gamma.clone(), gamma.clone(), zero.clone()],
            [eta.clone(), &beta + &kappa, zero.clone(), gamma.clone()],
            [eta.clone(), zero.clone(), &beta + &kappa, gamma.clone()],
            [zero.clone(), eta.clone(), eta.clone(), &kappa + &kappa],
        ];
        for br in 0..4 {
            for bc in 0..4 {
                let got = block.view((br * nd, bc * nd), (nd, nd));
                let want = &expected_blocks[br][bc];
                assert!(
                    (got - want).abs().max() < 1e-12,
                    "block ({br},{bc}) mismatch"
                );
            }
        }
    }

    #[test]
    fn quadratic_block_is_zero_when_f2_vanishes() {
        let sys = coupled_system(3, 0.0, 0.0, 1.0);
        let block = transfer_block(&sys, 2, 2, CarlemanRepr::Grouped).unwrap();
        assert_eq!(block.nnz(), 0);
    }

    #[test]
    fn leibniz_index_one_reproduces_coefficient() {
        let sys = coupled_system(3, 0.2, 0.1, 0.5);
        let block = transfer_block(&sys, 1, 1, CarlemanRepr::Full).unwrap();
        assert_eq!(block.to_dense(), sys.linear_operator().to_dense());
        let grouped = transfer_block(&sys, 1, 1, CarlemanRepr::Grouped).unwrap();
        assert_eq!(grouped.to_dense(), sys.linear_operator().to_dense());
    }

    #[test]
    fn full_mode_recursion_identity() {
        // B_j^i = B_j^1 ⊗ I^{(i-1)} + I ⊗ B_j^{i-1} for i <= 4. The dense
        // comparison is limited to i <= 3; at i = 4 the sparse entries are
        // compared directly.
        let sys = coupled_system(3, 0.2, -0.1, 0.8);
        let n = sys.state_dim();
        for j in [1usize, 3] {
            let b1 = transfer_block(&sys, 1, j, CarlemanRepr::Full).unwrap();
            let mut prev = b1.clone();
            for i in 2..=4usize {
                let direct = transfer_block(&sys, i, j, CarlemanRepr::Full).unwrap();
                let left = b1.kron(&CsrMatrix::identity(n.pow((i - 1) as u32)));
                let right = CsrMatrix::identity(n).kron(&prev);
                let mut acc = CooMatrix::new(direct.nrows(), direct.ncols());
                for (r, c, v) in left.iter() {
                    acc.push(r, c, v);
                }
                for (r, c, v) in right.iter() {
                    acc.push(r, c, v);
                }
                let recursed = acc.to_csr();
                if i <= 3 {
                    assert!(
                        (direct.to_dense() - recursed.to_dense()).abs().max() < 1e-12,
                        "recursion mismatch at i={i}, j={j}"
                    );
                } else {
                    let a: alloc::vec::Vec<_> = direct.iter().collect();
                    let b: alloc::vec::Vec<_> = recursed.iter().collect();
                    assert_eq!(a.len(), b.len(), "nnz mismatch at i={i}, j={j}");
                    for ((ra, ca, va), (rb, cb, vb)) in a.iter().zip(&b) {
                        assert_eq!((ra, ca), (rb, cb));
                        assert!((va - vb).abs() < 1e-12);
                    }
                }
                prev = direct;
            }
        }
    }

    #[test]
    fn gm_grouped_m3_block_pattern() {
        // GM (gamma = eta = 0): nonzero n_d-blocks of the 14-block M_3 are the
        // diagonal plus the cubic couplings (1,8) and (2,8).
        let sys = coupled_system(3, 0.0, 0.0, 1.0);
        let carleman = assemble(&sys, 3, CarlemanRepr::Grouped).unwrap();
        let nd = 3usize;
        let mut fine: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (r, c, _) in carleman.matrix().iter() {
            *fine.entry((r / nd + 1, c / nd + 1)).or_insert(0) += 1;
        }
        let got: Vec<(usize, usize)> = fine.keys().cloned().collect();
        let mut want: Vec<(usize, usize)> = (1..=14).map(|i| (i, i)).collect();
        want.push((1, 8));
        want.push((2, 8));
        want.sort();
        assert_eq!(got, want);
        assert!(carleman.is_block_upper_triangular());
    }

    #[test]
    fn linear_only_k1_is_f1_and_source() {
        let sys = coupled_system(4, 0.3, 0.0, 0.0);
        let carleman = assemble(&sys, 1, CarlemanRepr::Grouped).unwrap();
        assert_eq!(carleman.matrix().to_dense(), sys.linear_operator().to_dense());
        assert_eq!(carleman.b(), sys.source_vector().as_slice());
    }

    #[test]
    fn embed_examples() {
        // Grouped: S = 2, n_d = 2, block 2 holds node-wise products ordered
        // by species tuple.
        let y0 = [2.0, 3.0, 5.0, 7.0]; // a1 a2 b1 b2
        let z = embed(&y0, 2, 2, 2, CarlemanRepr::Grouped).unwrap();
        assert_eq!(
            z,
            vec![2.0, 3.0, 5.0, 7.0, 4.0, 9.0, 10.0, 21.0, 10.0, 21.0, 25.0, 49.0]
        );
        // Full: S = 1, n_d = 2.
        let z = embed(&[2.0, 3.0], 1, 2, 2, CarlemanRepr::Full).unwrap();
        assert_eq!(z, vec![2.0, 3.0, 4.0, 6.0, 6.0, 9.0]);
        // All-ones state embeds to all ones.
        let z = embed(&[1.0; 4], 2, 2, 3, CarlemanRepr::Grouped).unwrap();
        assert!(z.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn extract_round_trip() {
        let sys = coupled_system(3, 0.0, 0.0, 1.0);
        let carleman = assemble(&sys, 2, CarlemanRepr::Grouped).unwrap();
        let y0 = [0.3, 0.6, 0.9, 1.2, 1.5, 1.8];
        let z = embed(&y0, 2, 3, 2, CarlemanRepr::Grouped).unwrap();
        assert_eq!(carleman.extract(&z).unwrap(), &y0[..]);
        let zeros = vec![0.0; carleman.dim()];
        assert!(carleman.extract(&zeros).unwrap().iter().all(|&v| v == 0.0));
        assert!(carleman.extract(&[0.0; 3]).is_err());
    }

    #[test]
    fn norm_bound_linear_only() {
        let sys = coupled_system(4, 0.0, 0.0, 0.0);
        // mu = 5 on both species, D max = 1e-4, n = 4, d = 1.
        for k in 1..=3 {
            let expected = k as f64 * (4.0 * 16.0 * 1e-4 + 5.0);
            assert!((norm_bound(&sys, k, NormBoundKind::General) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_bound_scales_linearly_in_k() {
        let sys = coupled_system(3, 0.0, 0.0, 1.0);
        let b1 = norm_bound(&sys, 1, NormBoundKind::Autocatalytic);
        let b3 = norm_bound(&sys, 3, NormBoundKind::Autocatalytic);
        assert!((b3 - 3.0 * b1).abs() < 1e-12);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let sys = coupled_system(3, 0.0, 0.0, 1.0);
        assert!(matches!(
            assemble_with_cap(&sys, 4, CarlemanRepr::Full, 1000),
            Err(Error::ResourceLimit(_))
        ));
    }
}
