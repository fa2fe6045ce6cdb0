//! Mass-action reaction networks and their polynomial coefficient tensors.
//!
//! A network of reactions `sum_i alpha_{r,i} y_i -> sum_i beta_{r,i} y_i`
//! with rate constants `c_r` induces the polynomial right-hand side
//! `dY/dt = F_0 + F_1 Y + F_2 Y^{⊗2} + ... + F_ς Y^{⊗ς}`. This module builds
//! the sparse coefficient tensors `F_j`, evaluates the right-hand side, and
//! computes the norm chain used by the query-complexity bounds.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};

/// Largest dense tensor materialized for exact spectral norms.
const DENSE_NORM_CAP: usize = 1 << 20;

/// A single mass-action reaction with integer stoichiometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    alpha: Vec<u32>,
    beta: Vec<u32>,
    rate_bits: u64,
    /// Explicit tensor column for the reactant monomial, when the default
    /// ascending-sorted representative is not the wanted one.
    position_override: Option<usize>,
}

impl Reaction {
    /// Builds a reaction from reactant stoichiometry `alpha`, product
    /// stoichiometry `beta`, and a positive rate constant.
    ///
    /// Pure sources (`alpha` all zero) are rejected; source terms belong in
    /// `F_0`, not in the reaction list.
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>, rate: f64) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha.len(),
                got: beta.len(),
            });
        }
        if alpha.iter().all(|&a| a == 0) {
            return Err(Error::Domain(
                "pure source reaction (alpha = 0); encode sources in F_0".into(),
            ));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Domain(format!("rate constant must be positive, got {rate}")));
        }
        Ok(Self {
            alpha,
            beta,
            rate_bits: rate.to_bits(),
            position_override: None,
        })
    }

    /// Like [`Reaction::new`] but pins the tensor column to `position`
    /// (1-based). The decoded tuple at that position must be a permutation of
    /// the reactant multiset, so the represented monomial is unchanged; this
    /// admits orderings other than the ascending default, e.g. the
    /// catalyst-first canonical position of autocatalytic reactions.
    pub fn with_position(alpha: Vec<u32>, beta: Vec<u32>, rate: f64, position: usize) -> Result<Self> {
        let mut reaction = Self::new(alpha, beta, rate)?;
        let species = reaction.alpha.len();
        let order = reaction.order();
        let cols = species.checked_pow(order as u32).ok_or_else(|| {
            Error::ResourceLimit(format!("tensor column count {species}^{order} overflows"))
        })?;
        if position < 1 || position > cols {
            return Err(Error::Domain(format!(
                "monomial position {position} outside 1..={cols}"
            )));
        }
        let mut counts = vec![0u32; species];
        for entry in lex_decode(position, species, order) {
            counts[entry - 1] += 1;
        }
        if counts != reaction.alpha {
            return Err(Error::Domain(format!(
                "position {position} does not represent the reactant monomial"
            )));
        }
        reaction.position_override = Some(position);
        Ok(reaction)
    }

    /// Reactant stoichiometry vector.
    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    /// Product stoichiometry vector.
    pub fn beta(&self) -> &[u32] {
        &self.beta
    }

    /// Rate constant `c_r`.
    pub fn rate(&self) -> f64 {
        f64::from_bits(self.rate_bits)
    }

    /// Reaction order `ς_r = Σ_i alpha_i`.
    pub fn order(&self) -> usize {
        self.alpha.iter().map(|&a| a as usize).sum()
    }

    /// Total stoichiometric change `Σ_i |beta_i - alpha_i|`.
    pub fn total_change(&self) -> u64 {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(&a, &b)| (i64::from(b) - i64::from(a)).unsigned_abs())
            .sum()
    }

    /// Reactant tuple in canonical ascending species order, 1-based.
    ///
    /// Species `i` appears `alpha_i` times, so the tuple length equals the
    /// reaction order; this is the default monomial representative behind
    /// the tensor column index.
    pub fn canonical_tuple(&self) -> Vec<usize> {
        let mut tuple = Vec::with_capacity(self.order());
        for (i, &a) in self.alpha.iter().enumerate() {
            for _ in 0..a {
                tuple.push(i + 1);
            }
        }
        tuple
    }

    /// Tensor column `ℓ_r` of the reactant monomial (1-based): the pinned
    /// position when set, otherwise the ascending-sorted representative.
    pub fn monomial_position(&self, species: usize) -> Result<usize> {
        match self.position_override {
            Some(p) => Ok(p),
            None => lex_index(&self.canonical_tuple(), species),
        }
    }
}

/// A mass-action network over `S` species.
#[derive(Debug, Clone)]
pub struct ReactionNetwork {
    species: usize,
    reactions: Vec<Reaction>,
    max_order: usize,
}

impl ReactionNetwork {
    /// Validates per-reaction vector lengths and computes the maximum order.
    pub fn new(species: usize, reactions: Vec<Reaction>) -> Result<Self> {
        if species == 0 {
            return Err(Error::Domain("species count must be positive".into()));
        }
        for (r, reaction) in reactions.iter().enumerate() {
            if reaction.alpha.len() != species {
                return Err(Error::Domain(format!(
                    "reaction {r}: stoichiometry length {} != species count {species}",
                    reaction.alpha.len()
                )));
            }
        }
        let max_order = reactions.iter().map(Reaction::order).max().unwrap_or(0);
        Ok(Self {
            species,
            reactions,
            max_order,
        })
    }

    /// Number of species `S`.
    pub fn species(&self) -> usize {
        self.species
    }

    /// The reaction list.
    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Maximum reaction order `ς` present (0 for an empty network).
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `Σ_r Σ_i |alpha_{r,i} - beta_{r,i}|`, the stoichiometric-change sum
    /// feeding the block-encoding constant of the reaction-rate tensor.
    pub fn stoichiometric_change_sum(&self) -> u64 {
        self.reactions.iter().map(Reaction::total_change).sum()
    }
}

/// Pure autocatalytic network: one reaction per ordered pair `(i, j)`,
/// consuming one `y_j` as feedstock while `ς-1` copies of `y_i` catalyze the
/// production of one more `y_i`. For `i = j` the reaction degenerates to pure
/// growth `ς y_i -> (ς+1) y_i`, keeping the net production of `y_i` at one.
/// Tensor entries land at the catalyst-first canonical position
/// `ℓ_canon(i, j) = 𝓘_ς(i, …, i, j)`.
pub fn autocatalytic_network(
    species: usize,
    varsigma: usize,
    rates: &[(usize, usize, f64)],
) -> Result<ReactionNetwork> {
    if varsigma < 1 {
        return Err(Error::Domain("autocatalytic order must be >= 1".into()));
    }
    let mut reactions = Vec::with_capacity(rates.len());
    for &(i, j, c) in rates {
        if i < 1 || i > species || j < 1 || j > species {
            return Err(Error::Domain(format!("species index out of range: ({i}, {j})")));
        }
        let mut alpha = vec![0u32; species];
        alpha[i - 1] += (varsigma - 1) as u32;
        alpha[j - 1] += 1;
        let mut beta = alpha.clone();
        beta[i - 1] += 1;
        if i != j {
            beta[j - 1] -= 1;
        }
        let position = canonical_position(i, j, species, varsigma)?;
        reactions.push(Reaction::with_position(alpha, beta, c, position)?);
    }
    ReactionNetwork::new(species, reactions)
}

/// Lexicographic index of an ordered species tuple inside `Y^{⊗k}`.
///
/// Returns `1 + Σ_j (i_j - 1) S^{k-j}` (1-based), the order-preserving
/// bijection onto `1..=S^k`.
pub fn lex_index(tuple: &[usize], species: usize) -> Result<usize> {
    if species == 0 {
        return Err(Error::Domain("species count must be positive".into()));
    }
    let mut idx = 0usize;
    for &i in tuple {
        if i < 1 || i > species {
            return Err(Error::Domain(format!(
                "tuple entry {i} outside 1..={species}"
            )));
        }
        idx = idx * species + (i - 1);
    }
    Ok(idx + 1)
}

/// Inverse of [`lex_index`]: the ordered tuple of length `k` at 1-based
/// position `index` in `Y^{⊗k}`.
pub fn lex_decode(index: usize, species: usize, k: usize) -> Vec<usize> {
    let mut rem = index - 1;
    let mut tuple = vec![1usize; k];
    for slot in (0..k).rev() {
        tuple[slot] = rem % species + 1;
        rem /= species;
    }
    tuple
}

/// Canonical tensor position of the autocatalytic monomial `y_i^{ς-1} y_j`,
/// `j + (i-1)·S(S^{ς-1}-1)/(S-1)`; equals `lex_index` of `(i, …, i, j)`.
pub fn canonical_position(i: usize, j: usize, species: usize, varsigma: usize) -> Result<usize> {
    if species < 2 {
        return Err(Error::Domain(format!(
            "canonical position requires S >= 2, got {species}"
        )));
    }
    if varsigma < 1 {
        return Err(Error::Domain("order must be >= 1".into()));
    }
    if i < 1 || i > species || j < 1 || j > species {
        return Err(Error::Domain(format!("species index out of range: ({i}, {j})")));
    }
    let geo = species * (species.pow((varsigma - 1) as u32) - 1) / (species - 1);
    Ok(j + (i - 1) * geo)
}

/// `j`-th Kronecker power of `y` in lexicographic ordering; `j = 0` gives `[1]`.
pub fn tensor_power(y: &[f64], j: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..j {
        let mut next = Vec::with_capacity(out.len() * y.len());
        for &a in &out {
            for &b in y {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

/// Ingredients of the spectral-norm bound `C_max √(σ_max τ_max)` recorded at
/// tensor-assembly time.
///
/// `σ_max` is the largest per-species total stoichiometric change and
/// `τ_max` the largest total change accumulated on a single tensor column
/// (reactions sharing a reactant monomial add their absolute changes; signs
/// never cancel, so the bound stays sound). The per-reaction alternative,
/// `max_r Σ_i |Δ_{r,i}|`, ignores column collisions and can undershoot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBoundData {
    /// Largest rate constant among the contributing reactions.
    pub c_max: f64,
    /// `max_i Σ_r |beta_{r,i} - alpha_{r,i}|`.
    pub sigma_max: f64,
    /// `max_ℓ Σ_i Σ_{r: ℓ_r = ℓ} |beta_{r,i} - alpha_{r,i}|`.
    pub tau_max: f64,
}

impl NormBoundData {
    /// The bound `C_max √(σ_max τ_max)`.
    pub fn two_bound(&self) -> f64 {
        self.c_max * (self.sigma_max * self.tau_max).sqrt()
    }
}

/// Sparse coefficient tensor `F_j ∈ R^{S × S^j}`.
#[derive(Debug, Clone)]
pub struct CoefficientTensor {
    order: usize,
    rows: usize,
    /// Row-major `(row, col, value)` with 0-based indices, deduplicated.
    entries: Vec<(usize, usize, f64)>,
    bound: NormBoundData,
}

impl CoefficientTensor {
    /// Zero tensor of the given order.
    pub fn zero(rows: usize, order: usize) -> Self {
        Self {
            order,
            rows,
            entries: Vec::new(),
            bound: NormBoundData {
                c_max: 0.0,
                sigma_max: 0.0,
                tau_max: 0.0,
            },
        }
    }

    /// Builds a tensor from raw entries (1-based rows/cols), summing
    /// duplicates. The norm-bound data falls back to `√(‖F‖_∞ ‖F‖_1)`, the
    /// middle link of the norm chain, since no per-reaction stoichiometry is
    /// available.
    pub fn from_entries(
        rows: usize,
        order: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let cols = rows.checked_pow(order as u32).ok_or_else(|| {
            Error::ResourceLimit(format!("tensor column count S^{order} overflows"))
        })?;
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (r, c, v) in entries {
            if r < 1 || r > rows || c < 1 || c > cols {
                return Err(Error::Domain(format!("tensor entry out of range: ({r}, {c})")));
            }
            *map.entry((r - 1, c - 1)).or_insert(0.0) += v;
        }
        let entries: Vec<_> = map
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        let mut t = Self {
            order,
            rows,
            entries,
            bound: NormBoundData {
                c_max: 0.0,
                sigma_max: 0.0,
                tau_max: 0.0,
            },
        };
        let inf = t.inf_norm();
        let one = t.one_norm();
        t.bound = NormBoundData {
            c_max: 1.0,
            sigma_max: inf,
            tau_max: one,
        };
        Ok(t)
    }

    /// Tensor order `j`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of rows `S`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns `S^j`.
    pub fn cols(&self) -> usize {
        self.rows.pow(self.order as u32)
    }

    /// Stored entries as `(row, col, value)` with 0-based indices.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Norm-bound ingredients recorded at assembly.
    pub fn bound_data(&self) -> NormBoundData {
        self.bound
    }

    /// `F_j · Y^{⊗j}` evaluated sparsely through monomial exponents.
    pub fn apply_power(&self, y: &[f64], out: &mut [f64]) {
        for &(r, c, v) in &self.entries {
            let mut monomial = v;
            if self.order > 0 {
                let mut rem = c;
                for _ in 0..self.order {
                    monomial *= y[rem % self.rows];
                    rem /= self.rows;
                }
            }
            out[r] += monomial;
        }
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let mut sums = vec![0.0f64; self.rows];
        for &(r, _, v) in &self.entries {
            sums[r] += v.abs();
        }
        sums.into_iter().fold(0.0f64, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
        for &(_, c, v) in &self.entries {
            *sums.entry(c).or_insert(0.0) += v.abs();
        }
        sums.into_values().fold(0.0f64, f64::max)
    }

    /// Exact spectral norm via dense SVD; tensors here are small by
    /// construction (`S ≤` a few, `ς ≤` a few).
    pub fn two_norm(&self) -> Result<f64> {
        if self.entries.is_empty() {
            return Ok(0.0);
        }
        let cols = self.cols();
        if self.rows.saturating_mul(cols) > DENSE_NORM_CAP {
            return Err(Error::ResourceLimit(format!(
                "dense spectral norm of a {}x{cols} tensor exceeds the cap",
                self.rows
            )));
        }
        let mut dense = DMatrix::<f64>::zeros(self.rows, cols);
        for &(r, c, v) in &self.entries {
            dense[(r, c)] = v;
        }
        let svd = dense.svd(false, false);
        Ok(svd.singular_values.iter().cloned().fold(0.0f64, f64::max))
    }

    /// Full norm record: exact ∞-, 1-, and spectral norms plus the
    /// `C_max √(σ_max τ_max)` bound.
    pub fn norms(&self) -> Result<TensorNorms> {
        Ok(TensorNorms {
            inf_norm: self.inf_norm(),
            one_norm: self.one_norm(),
            two_norm: self.two_norm()?,
            two_bound: self.bound.two_bound(),
        })
    }
}

/// Norm record produced by [`CoefficientTensor::norms`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorNorms {
    /// Exact operator infinity norm (max absolute row sum).
    pub inf_norm: f64,
    /// Exact operator 1-norm (max absolute column sum).
    pub one_norm: f64,
    /// Exact spectral norm.
    pub two_norm: f64,
    /// `C_max √(σ_max τ_max)`; always `>= two_norm`.
    pub two_bound: f64,
}

/// Builds the order-`j` coefficient tensor of a network:
/// `F_ς[i, ℓ] = Σ_{r: ς_r = ς} (beta_{r,i} - alpha_{r,i}) c_r δ_{ℓ, ℓ_r}`
/// where `ℓ_r` indexes the sorted reactant monomial. Orders with no reactions
/// yield the zero tensor; duplicate reactions sum.
pub fn build_tensor(network: &ReactionNetwork, order: usize) -> Result<CoefficientTensor> {
    if order < 1 {
        return Err(Error::Domain("tensor order must be >= 1; order 0 is the source vector".into()));
    }
    let s = network.species();
    let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut c_max = 0.0f64;
    let mut sigma = vec![0.0f64; s];
    let mut tau: BTreeMap<usize, f64> = BTreeMap::new();
    for reaction in network.reactions() {
        if reaction.order() != order {
            continue;
        }
        let col = reaction.monomial_position(s)?;
        let rate = reaction.rate();
        c_max = c_max.max(rate);
        for i in 0..s {
            let delta = f64::from(reaction.beta[i]) - f64::from(reaction.alpha[i]);
            if delta != 0.0 {
                *map.entry((i, col - 1)).or_insert(0.0) += delta * rate;
                sigma[i] += delta.abs();
                *tau.entry(col - 1).or_insert(0.0) += delta.abs();
            }
        }
    }
    let entries: Vec<_> = map
        .into_iter()
        .filter(|&(_, v)| v != 0.0)
        .map(|((r, c), v)| (r, c, v))
        .collect();
    Ok(CoefficientTensor {
        order,
        rows: s,
        entries,
        bound: NormBoundData {
            c_max,
            sigma_max: sigma.into_iter().fold(0.0f64, f64::max),
            tau_max: tau.into_values().fold(0.0f64, f64::max),
        },
    })
}

/// The full set `F_0..F_ς` for one network, plus the explicit source vector.
#[derive(Debug, Clone)]
pub struct CoefficientTensors {
    species: usize,
    source: Vec<f64>,
    /// Tensors for orders `1..=max_order`, indexed by `order - 1`.
    tensors: Vec<CoefficientTensor>,
}

impl CoefficientTensors {
    /// Builds every order tensor of the network with a zero source vector.
    pub fn from_network(network: &ReactionNetwork) -> Result<Self> {
        let mut tensors = Vec::with_capacity(network.max_order());
        for order in 1..=network.max_order() {
            tensors.push(build_tensor(network, order)?);
        }
        Ok(Self {
            species: network.species(),
            source: vec![0.0; network.species()],
            tensors,
        })
    }

    /// Builds the set from hand-assembled tensors. `tensors[j]` must be the
    /// order-`j+1` tensor with `species` rows.
    pub fn from_parts(
        species: usize,
        source: Vec<f64>,
        tensors: Vec<CoefficientTensor>,
    ) -> Result<Self> {
        if source.len() != species {
            return Err(Error::DimensionMismatch {
                expected: species,
                got: source.len(),
            });
        }
        for (idx, t) in tensors.iter().enumerate() {
            if t.rows() != species || t.order() != idx + 1 {
                return Err(Error::Domain(format!(
                    "tensor at slot {idx} must have order {} and {species} rows",
                    idx + 1
                )));
            }
        }
        Ok(Self {
            species,
            source,
            tensors,
        })
    }

    /// Replaces the inhomogeneous source vector `F_0`.
    pub fn with_source(mut self, source: Vec<f64>) -> Result<Self> {
        if source.len() != self.species {
            return Err(Error::DimensionMismatch {
                expected: self.species,
                got: source.len(),
            });
        }
        self.source = source;
        Ok(self)
    }

    /// Number of species `S`.
    pub fn species(&self) -> usize {
        self.species
    }

    /// The source vector `F_0`.
    pub fn source(&self) -> &[f64] {
        &self.source
    }

    /// Highest tensor order `ς` (0 when only a source is present).
    pub fn max_order(&self) -> usize {
        self.tensors.len()
    }

    /// Tensor of the given order (`1..=max_order`).
    pub fn tensor(&self, order: usize) -> Option<&CoefficientTensor> {
        if order >= 1 {
            self.tensors.get(order - 1)
        } else {
            None
        }
    }

    /// All order tensors `F_1..F_ς`.
    pub fn tensors(&self) -> &[CoefficientTensor] {
        &self.tensors
    }

    /// `Σ_j F_j · Y^{⊗j}` including the source term; diffusion is not part of
    /// this evaluation.
    pub fn rhs_eval(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.species {
            return Err(Error::DimensionMismatch {
                expected: self.species,
                got: y.len(),
            });
        }
        let mut out = self.source.clone();
        for tensor in &self.tensors {
            tensor.apply_power(y, &mut out);
        }
        Ok(out)
    }
}
