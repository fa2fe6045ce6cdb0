//! Reaction-rate constants from free-energy differences.
//!
//! The Eyring equation `c = (k_B T / 2π) e^{-ΔG/k_B T}` (units with `ħ = 1`)
//! converts an activation free energy into a rate constant. Free-energy
//! differences between two Hamiltonians come from the Zwanzig exponential
//! average in the reference ensemble of `H_i`, or from its second-order
//! mean-minus-half-variance expansion.
//!
//! Sign convention: the default estimators average `e^{-(H_j - H_i)/k_B T}`
//! in the state of `H_i`, the forward-perturbation form consistent with the
//! second-order expansion in `ΔH = H_j - H_i`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// Exact evaluation is restricted to operators of this size.
pub const DIM_CAP: usize = 64;

/// Largest exponent magnitude fed to `exp` before refusing.
const EXP_GUARD: f64 = 700.0;

/// Thermodynamic context: `k_B T` in energy units (`ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoContext {
    /// Thermal energy `k_B T > 0`.
    pub kbt: f64,
}

impl ThermoContext {
    /// Validates `k_B T > 0`.
    pub fn new(kbt: f64) -> Result<Self> {
        if !(kbt > 0.0) || !kbt.is_finite() {
            return Err(Error::Domain(format!("kBT must be positive, got {kbt}")));
        }
        Ok(Self { kbt })
    }
}

/// Eyring rate `(k_B T / 2π) e^{-ΔG/k_B T}`.
///
/// Refuses exponents `-ΔG/k_B T > 700` where `exp` overflows double
/// precision.
pub fn eyring_rate(delta_g: f64, ctx: &ThermoContext) -> Result<f64> {
    let exponent = -delta_g / ctx.kbt;
    if exponent > EXP_GUARD {
        return Err(Error::Overflow(format!(
            "Eyring exponent -ΔG/kBT = {exponent:.1} exceeds {EXP_GUARD}; rate would overflow"
        )));
    }
    Ok(ctx.kbt / (2.0 * core::f64::consts::PI) * exponent.exp())
}

/// A pair of Hermitian Hamiltonians of matching dimension.
#[derive(Debug, Clone)]
pub struct HamiltonianPair {
    h_i: DMatrix<C64>,
    h_j: DMatrix<C64>,
}

impl HamiltonianPair {
    /// Validates shape, the dimension cap, and Hermiticity of both operators.
    pub fn new(h_i: DMatrix<C64>, h_j: DMatrix<C64>) -> Result<Self> {
        for h in [&h_i, &h_j] {
            if h.nrows() != h.ncols() {
                return Err(Error::DimensionMismatch {
                    expected: h.nrows(),
                    got: h.ncols(),
                });
            }
            if h.nrows() > DIM_CAP {
                return Err(Error::ResourceLimit(format!(
                    "Hamiltonians are capped at dimension {DIM_CAP}, got {}",
                    h.nrows()
                )));
            }
            let scale = h.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(1.0);
            let dev = hermitian_deviation(h);
            if dev > 1e-12 * scale {
                return Err(Error::NotHermitian(dev));
            }
        }
        if h_i.nrows() != h_j.nrows() {
            return Err(Error::DimensionMismatch {
                expected: h_i.nrows(),
                got: h_j.nrows(),
            });
        }
        Ok(Self { h_i, h_j })
    }

    /// Pair of real diagonal Hamiltonians.
    pub fn diagonal(e_i: &[f64], e_j: &[f64]) -> Result<Self> {
        if e_i.len() != e_j.len() {
            return Err(Error::DimensionMismatch {
                expected: e_i.len(),
                got: e_j.len(),
            });
        }
        let n = e_i.len();
        let h_i = DMatrix::from_fn(n, n, |r, c| {
            C64::new(if r == c { e_i[r] } else { 0.0 }, 0.0)
        });
        let h_j = DMatrix::from_fn(n, n, |r, c| {
            C64::new(if r == c { e_j[r] } else { 0.0 }, 0.0)
        });
        Self::new(h_i, h_j)
    }

    /// Reference Hamiltonian `H_i`.
    pub fn h_i(&self) -> &DMatrix<C64> {
        &self.h_i
    }

    /// Target Hamiltonian `H_j`.
    pub fn h_j(&self) -> &DMatrix<C64> {
        &self.h_j
    }

    /// Frobenius norm of the commutator `[H_i, H_j]`.
    pub fn commutator_norm(&self) -> f64 {
        let comm = &self.h_i * &self.h_j - &self.h_j * &self.h_i;
        comm.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn hermitian_deviation(h: &DMatrix<C64>) -> f64 {
    let mut dev = 0.0f64;
    for r in 0..h.nrows() {
        for c in 0..h.ncols() {
            dev = dev.max((h[(r, c)] - h[(c, r)].conj()).norm());
        }
    }
    dev
}

/// Sorted eigenvalues and matching eigenvectors of a Hermitian matrix.
fn sorted_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &eig.eigenvectors.column(old));
    }
    (values, vectors)
}

/// Simultaneous eigenvalue pairing for a commuting pair: eigenvalues of
/// `H_i` together with the eigenvalues of `H_j` in the same joint basis
/// (degenerate clusters of `H_i` are rediagonalized against `H_j`).
fn paired_spectra(pair: &HamiltonianPair) -> (Vec<f64>, Vec<f64>) {
    let (e_i, v) = sorted_eigen(&pair.h_i);
    let b = v.adjoint() * &pair.h_j * &v;
    let n = e_i.len();
    let spread = (e_i[n - 1] - e_i[0]).abs().max(1.0);
    let tol = 1e-8 * spread;
    let mut e_j = alloc::vec![0.0f64; n];
    let mut start = 0usize;
    while start < n {
        let mut end = start + 1;
        while end < n && (e_i[end] - e_i[end - 1]).abs() <= tol {
            end += 1;
        }
        if end - start == 1 {
            e_j[start] = b[(start, start)].re;
        } else {
            let sub = b.view((start, start), (end - start, end - start)).into_owned();
            let sub_eig = nalgebra::SymmetricEigen::new(sub);
            let mut vals: Vec<f64> = sub_eig.eigenvalues.iter().cloned().collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            e_j[start..end].copy_from_slice(&vals);
        }
        start = end;
    }
    (e_i, e_j)
}

/// `ln Σ_n e^{-(e_n - min)/kbt}` together with the shift, a stable log-sum.
fn shifted_log_partition(energies: &[f64], kbt: f64) -> (f64, f64) {
    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let log_sum = energies
        .iter()
        .map(|&e| (-(e - min) / kbt).exp())
        .sum::<f64>()
        .ln();
    (log_sum, min)
}

/// Exact Zwanzig free-energy difference for a commuting pair:
/// `ΔG = -k_B T ln Σ_n p_n e^{-(E_{j,n} - E_{i,n})/k_B T}` with Gibbs weights
/// `p_n` of `H_i`. Refuses pairs whose commutator norm exceeds the tolerance.
pub fn zwanzig_exact(pair: &HamiltonianPair, ctx: &ThermoContext) -> Result<f64> {
    let scale = 1.0f64.max(
        pair.h_i.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
            * pair.h_j.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
    );
    let comm = pair.commutator_norm();
    if comm > 1e-10 * scale {
        return Err(Error::NonCommuting(comm));
    }
    let (e_i, e_j) = paired_spectra(pair);
    // With the joint pairing the Gibbs average telescopes into the partition
    // ratio; both log-sums are shifted for stability.
    let (ls_i, m_i) = shifted_log_partition(&e_i, ctx.kbt);
    let (ls_j, m_j) = shifted_log_partition(&e_j, ctx.kbt);
    Ok((m_j - m_i) - ctx.kbt * (ls_j - ls_i))
}

/// Partition-function route `-k_B T ln(Z_j/Z_i)`, valid for non-commuting
/// pairs as a diagnostic; each spectrum is diagonalized independently.
pub fn free_energy_from_partition(pair: &HamiltonianPair, ctx: &ThermoContext) -> f64 {
    let (e_i, _) = sorted_eigen(&pair.h_i);
    let (e_j, _) = sorted_eigen(&pair.h_j);
    let (ls_i, m_i) = shifted_log_partition(&e_i, ctx.kbt);
    let (ls_j, m_j) = shifted_log_partition(&e_j, ctx.kbt);
    (m_j - m_i) - ctx.kbt * (ls_j - ls_i)
}

/// Reference state of the second-order estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Gibbs state of `H_i` at the context temperature.
    Thermal,
    /// Nondegenerate ground state of `H_i`.
    GroundState,
}

/// Second-order free-energy estimate
/// `⟨ΔH⟩ - (⟨ΔH²⟩ - ⟨ΔH⟩²)/(2 k_B T)` with `ΔH = H_j - H_i`, evaluated in
/// the chosen reference state of `H_i`.
pub fn zwanzig_second_order(
    pair: &HamiltonianPair,
    ctx: &ThermoContext,
    reference: Reference,
) -> Result<f64> {
    let delta = &pair.h_j - &pair.h_i;
    let (mean, second_moment) = match reference {
        Reference::Thermal => {
            let (e_i, v) = sorted_eigen(&pair.h_i);
            let a = v.adjoint() * &delta * &v;
            let min = e_i[0];
            let weights: Vec<f64> = e_i.iter().map(|&e| (-(e - min) / ctx.kbt).exp()).collect();
            let z: f64 = weights.iter().sum();
            let n = e_i.len();
            let mut mean = 0.0;
            let mut second = 0.0;
            for i in 0..n {
                let p = weights[i] / z;
                mean += p * a[(i, i)].re;
                // (A²)_{ii} = Σ_m |A_{im}|² for Hermitian A.
                let mut row = 0.0;
                for m in 0..n {
                    row += a[(i, m)].norm_sqr();
                }
                second += p * row;
            }
            (mean, second)
        }
        Reference::GroundState => {
            let (e_i, v) = sorted_eigen(&pair.h_i);
            if e_i.len() < 2 {
                return Err(Error::Domain("ground-state reference needs dimension >= 2".into()));
            }
            let gap = e_i[1] - e_i[0];
            if gap < 1e-10 {
                return Err(Error::DegenerateGroundState(gap));
            }
            let psi: DVector<C64> = v.column(0).into_owned();
            let dpsi = &delta * &psi;
            let mean = psi.dotc(&dpsi).re;
            let second = dpsi.dotc(&dpsi).re;
            (mean, second)
        }
    };
    let variance = second_moment - mean * mean;
    Ok(mean - variance / (2.0 * ctx.kbt))
}

/// Alternative ground-state expansion
/// `⟨H_j⟩ - E_i - (⟨H_j²⟩ - ⟨H_j⟩² - 2 Re⟨H_i H_j⟩)/(2 k_B T)`.
///
/// This form drops cross terms of the variance, so it does not vanish at
/// `H_j = H_i`; the variance form above is the consistent default and this
/// variant exists for side-by-side comparison.
pub fn zwanzig_second_order_literal(
    pair: &HamiltonianPair,
    ctx: &ThermoContext,
) -> Result<f64> {
    let (e_i, v) = sorted_eigen(&pair.h_i);
    if e_i.len() < 2 {
        return Err(Error::Domain("ground-state reference needs dimension >= 2".into()));
    }
    let gap = e_i[1] - e_i[0];
    if gap < 1e-10 {
        return Err(Error::DegenerateGroundState(gap));
    }
    let psi: DVector<C64> = v.column(0).into_owned();
    let hj_psi = &pair.h_j * &psi;
    let mean_j = psi.dotc(&hj_psi).re;
    let second_j = hj_psi.dotc(&hj_psi).re;
    let hi_psi = &pair.h_i * &psi;
    let cross = hi_psi.dotc(&hj_psi).re; // Re⟨ψ|H_i H_j|ψ⟩
    Ok(mean_j - e_i[0] - (second_j - mean_j * mean_j - 2.0 * cross) / (2.0 * ctx.kbt))
}

/// Applies [`eyring_rate`] to a table of free-energy differences.
pub fn rates_from_table(
    table: &BTreeMap<(u32, u32), f64>,
    ctx: &ThermoContext,
) -> Result<BTreeMap<(u32, u32), f64>> {
    let mut out = BTreeMap::new();
    for (&key, &dg) in table {
        if !dg.is_finite() {
            return Err(Error::Domain(format!(
                "ΔG for pair {key:?} must be finite, got {dg}"
            )));
        }
        out.insert(key, eyring_rate(dg, ctx)?);
    }
    Ok(out)
}
