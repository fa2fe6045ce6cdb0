//! Desk-scale verification of the linear-combination-of-Hamiltonian-
//! simulations (LCHS) representation of a dissipative propagator.
//!
//! For a square matrix `A = L + iH` (Cartesian decomposition, `L` positive
//! semi-definite) the propagator admits the integral representation
//!
//! ```text
//! e^{-At} = ∫_R f(k)/(1 - ik) · e^{-it(kL + H)} dk,
//! f(z) = e^{2^β}/(2π) · e^{-(1+iz)^β},   β ∈ (0, 1)
//! ```
//!
//! This module discretizes the integral with composite Gauss-Legendre
//! quadrature on `[-K, K]`, evaluates each unitary factor by dense Hermitian
//! eigendecomposition (dimension capped at 64), and reconstructs both the
//! homogeneous propagator and the inhomogeneous variation-of-constants term.
//!
//! Callers verifying Carleman systems `dZ/dt = M Z` pass `A = -M` (possibly
//! shifted) so that the Hermitian part is positive semi-definite.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// Dense eigendecomposition cap: this module verifies an identity, it is not
/// a solver.
pub const DIM_CAP: usize = 64;

/// Gauss-Legendre points per quadrature panel.
const PANEL_POINTS: usize = 16;

/// Tolerance scale for the positive-semi-definiteness check of `L`.
const PSD_SLACK: f64 = 1e-9;

/// Quadrature configuration for the LCHS verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LCHSConfig {
    /// Kernel decay exponent `β ∈ (0, 1)`.
    pub beta: f64,
    /// Truncation of the `k`-integral to `[-K, K]`.
    pub k_max: f64,
    /// Total `k`-quadrature nodes (rounded up to whole 16-point panels).
    pub nodes: usize,
    /// Total `s`-quadrature nodes for the inhomogeneous term.
    pub s_nodes: usize,
    /// Evolution time.
    pub t: f64,
}

impl LCHSConfig {
    /// Validates `0 < β < 1`, `K > 0`, and node counts `>= 2`.
    pub fn new(beta: f64, k_max: f64, nodes: usize, s_nodes: usize, t: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Domain(format!("beta must lie in (0, 1), got {beta}")));
        }
        if !(k_max > 0.0) || !k_max.is_finite() {
            return Err(Error::Domain(format!("K must be positive, got {k_max}")));
        }
        if nodes < 2 || s_nodes < 2 {
            return Err(Error::Domain(format!(
                "node counts must be >= 2, got nodes={nodes}, s_nodes={s_nodes}"
            )));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("evolution time must be >= 0, got {t}")));
        }
        Ok(Self {
            beta,
            k_max,
            nodes,
            s_nodes,
            t,
        })
    }
}

/// Default truncation threshold `K = ceil((ln(g/ε))^{1/β})` with unit
/// constant, from the asymptotic threshold shape.
pub fn default_truncation(g: f64, eps: f64, beta: f64) -> f64 {
    let arg = (g / eps).ln().max(1.0);
    arg.powf(1.0 / beta).ceil()
}

/// Hermitian/anti-Hermitian split `M = L + iH`.
#[derive(Debug, Clone)]
pub struct CartesianPair {
    /// Hermitian part `(M + M†)/2`.
    pub l: DMatrix<C64>,
    /// Hermitian matrix `(M - M†)/(2i)`.
    pub h: DMatrix<C64>,
}

/// Cartesian decomposition of a square matrix; the parts are Hermitian by
/// construction (exactly symmetrized entry pairs).
pub fn cartesian_decompose(m: &DMatrix<C64>) -> Result<CartesianPair> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let n = m.nrows();
    let mut l = DMatrix::<C64>::zeros(n, n);
    let mut h = DMatrix::<C64>::zeros(n, n);
    let half = C64::new(0.5, 0.0);
    let half_over_i = C64::new(0.0, -0.5); // 1/(2i)
    for r in 0..n {
        for c in 0..n {
            let a = m[(r, c)];
            let b = m[(c, r)].conj();
            l[(r, c)] = half * (a + b);
            h[(r, c)] = half_over_i * (a - b);
        }
    }
    Ok(CartesianPair { l, h })
}

/// The LCHS kernel `f(z) = e^{2^β}/(2π) · e^{-(1+iz)^β}` with the principal
/// branch of the complex power.
pub fn kernel(z: C64, beta: f64) -> Result<C64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta must lie in (0, 1), got {beta}")));
    }
    let prefactor = (2.0f64.powf(beta)).exp() / (2.0 * core::f64::consts::PI);
    let base = C64::new(1.0, 0.0) + C64::new(0.0, 1.0) * z;
    Ok(C64::new(prefactor, 0.0) * (-base.powf(beta)).exp())
}

/// Nodes and weights of the `p`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre polynomial.
fn gauss_legendre_unit(p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    for i in 0..p {
        // Chebyshev-like initial guess, then Newton on P_p.
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (value, deriv) = legendre_value_deriv(p, x);
            dp = deriv;
            let dx = value / deriv;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[p - 1 - i] = x;
        weights[p - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `(P_p(x), P_p'(x))` by the three-term recurrence.
fn legendre_value_deriv(p: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=p {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let deriv = p as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, deriv)
}

/// Composite Gauss-Legendre rule on `[a, b]` with at least `total` nodes
/// (whole 16-point panels).
pub fn composite_gauss_legendre(a: f64, b: f64, total: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = total.div_ceil(PANEL_POINTS).max(1);
    let (xu, wu) = gauss_legendre_unit(PANEL_POINTS);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * PANEL_POINTS);
    let mut weights = Vec::with_capacity(panels * PANEL_POINTS);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        for i in 0..PANEL_POINTS {
            nodes.push(mid + half * xu[i]);
            weights.push(half * wu[i]);
        }
    }
    (nodes, weights)
}

/// Discrete LCU data: quadrature nodes `k_j`, complex coefficients
/// `c_j = w_j f(k_j)/(1 - i k_j)`, and `‖c‖₁ = Σ_j |c_j|`.
#[derive(Debug, Clone)]
pub struct LcuCoefficients {
    /// Quadrature nodes in ascending order.
    pub nodes: Vec<f64>,
    /// Complex combination coefficients, one per node.
    pub coefficients: Vec<C64>,
    /// `Σ_j |c_j|`.
    pub one_norm: f64,
}

/// Builds the LCU coefficients of the truncated kernel integral.
pub fn lcu_coefficients(cfg: &LCHSConfig) -> Result<LcuCoefficients> {
    let (nodes, weights) = composite_gauss_legendre(-cfg.k_max, cfg.k_max, cfg.nodes);
    let mut coefficients = Vec::with_capacity(nodes.len());
    let mut one_norm = 0.0;
    for (&k, &w) in nodes.iter().zip(&weights) {
        let f = kernel(C64::new(k, 0.0), cfg.beta)?;
        let c = C64::new(w, 0.0) * f / C64::new(1.0, -k);
        one_norm += c.norm();
        coefficients.push(c);
    }
    Ok(LcuCoefficients {
        nodes,
        coefficients,
        one_norm,
    })
}

/// Eigendecomposition of the Hermitian matrix `kL + H`.
struct HamiltonianFactor {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl HamiltonianFactor {
    fn new(pair: &CartesianPair, k: f64) -> Self {
        let ham = pair.l.map(|v| v * C64::new(k, 0.0)) + &pair.h;
        let eig = nalgebra::SymmetricEigen::new(ham);
        HamiltonianFactor {
            eigenvalues: eig.eigenvalues.iter().cloned().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `e^{-i t (kL + H)}` as a dense matrix.
    fn propagator(&self, t: f64) -> DMatrix<C64> {
        let n = self.eigenvalues.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = C64::new(0.0, -t * lambda).exp();
            for r in 0..n {
                scaled[(r, j)] *= phase;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// `e^{-i t (kL + H)} b` without forming the matrix.
    fn apply(&self, t: f64, b_in_basis: &DVector<C64>) -> DVector<C64> {
        let mut coeffs = b_in_basis.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            coeffs[j] *= C64::new(0.0, -t * lambda).exp();
        }
        &self.vectors * coeffs
    }
}

fn check_dim(m: &DMatrix<C64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m.nrows() > DIM_CAP {
        return Err(Error::ResourceLimit(format!(
            "LCHS verifier is capped at dimension {DIM_CAP}, got {}",
            m.nrows()
        )));
    }
    Ok(())
}

/// Smallest eigenvalue of the Hermitian part; the stability diagnostic for
/// the PSD precondition.
pub fn min_hermitian_eigenvalue(m: &DMatrix<C64>) -> Result<f64> {
    let pair = cartesian_decompose(m)?;
    let eig = nalgebra::SymmetricEigen::new(pair.l.clone());
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

fn check_psd(pair: &CartesianPair) -> Result<()> {
    let eig = nalgebra::SymmetricEigen::new(pair.l.clone());
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1.0);
    if min < -PSD_SLACK * scale {
        return Err(Error::NotPositiveSemiDefinite(min));
    }
    Ok(())
}

/// Reconstructs `e^{-At}` as `Σ_j c_j e^{-it(k_j L + H)}`.
///
/// Requires the Hermitian part of `a` to be positive semi-definite; the sum
/// runs in ascending node order for determinism.
pub fn reconstruct_propagator(a: &DMatrix<C64>, cfg: &LCHSConfig) -> Result<DMatrix<C64>> {
    check_dim(a)?;
    let pair = cartesian_decompose(a)?;
    check_psd(&pair)?;
    let lcu = lcu_coefficients(cfg)?;
    let n = a.nrows();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for (&k, &c) in lcu.nodes.iter().zip(&lcu.coefficients) {
        let factor = HamiltonianFactor::new(&pair, k);
        out += factor.propagator(cfg.t).map(|v| v * c);
    }
    Ok(out)
}

/// Solves `dZ/dt = -A Z + b` with constant `b` by the discretized LCHS sum:
/// homogeneous part plus the double quadrature over `(s, k)` of
/// `e^{-(t-s)A} b`.
pub fn solve_inhomogeneous(
    a: &DMatrix<C64>,
    b: &DVector<C64>,
    z0: &DVector<C64>,
    cfg: &LCHSConfig,
) -> Result<DVector<C64>> {
    check_dim(a)?;
    if b.len() != a.nrows() || z0.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: if b.len() != a.nrows() { b.len() } else { z0.len() },
        });
    }
    let pair = cartesian_decompose(a)?;
    check_psd(&pair)?;
    let lcu = lcu_coefficients(cfg)?;
    let (s_nodes, s_weights) = composite_gauss_legendre(0.0, cfg.t, cfg.s_nodes);
    let n = a.nrows();
    let mut out = DVector::<C64>::zeros(n);
    for (&k, &c) in lcu.nodes.iter().zip(&lcu.coefficients) {
        let factor = HamiltonianFactor::new(&pair, k);
        // Homogeneous contribution.
        let z0_basis = factor.vectors.adjoint() * z0;
        out += factor.apply(cfg.t, &z0_basis).map(|v| v * c);
        // Inhomogeneous contribution; the eigenbasis is reused across s-nodes.
        let b_basis = factor.vectors.adjoint() * b;
        let mut acc = DVector::<C64>::zeros(n);
        for (&s, &w) in s_nodes.iter().zip(&s_weights) {
            let mut coeffs = b_basis.clone();
            for (j, &lambda) in factor.eigenvalues.iter().enumerate() {
                coeffs[j] *= C64::new(0.0, -(cfg.t - s) * lambda).exp() * C64::new(w, 0.0);
            }
            acc += coeffs;
        }
        out += (&factor.vectors * acc).map(|v| v * c);
    }
    Ok(out)
}

/// Frobenius norm of the difference of two complex matrices.
pub fn frobenius_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: f64) -> LCHSConfig {
        LCHSConfig::new(0.8, 60.0, 1024, 64, t).unwrap()
    }

    fn real_matrix(entries: &[&[f64]]) -> DMatrix<C64> {
        let n = entries.len();
        DMatrix::from_fn(n, entries[0].len(), |r, c| C64::new(entries[r][c], 0.0))
    }

    #[test]
    fn config_validates_beta() {
        assert!(LCHSConfig::new(1.5, 10.0, 64, 8, 1.0).is_err());
        assert!(LCHSConfig::new(0.0, 10.0, 64, 8, 1.0).is_err());
        assert!(LCHSConfig::new(0.8, -1.0, 64, 8, 1.0).is_err());
        assert!(LCHSConfig::new(0.8, 10.0, 1, 8, 1.0).is_err());
    }

    #[test]
    fn cartesian_special_cases() {
        // Hermitian input: H = 0.
        let m = real_matrix(&[&[2.0, 1.0], &[1.0, -3.0]]);
        let pair = cartesian_decompose(&m).unwrap();
        assert!(pair.h.iter().all(|v| v.norm() < 1e-15));
        // Anti-Hermitian input: L = 0.
        let m = DMatrix::from_fn(2, 2, |r, c| {
            if r == c {
                C64::new(0.0, 0.0)
            } else if r < c {
                C64::new(1.0, 0.0)
            } else {
                C64::new(-1.0, 0.0)
            }
        });
        let pair = cartesian_decompose(&m).unwrap();
        assert!(pair.l.iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn cartesian_round_trip() {
        let m = DMatrix::from_fn(4, 4, |r, c| {
            C64::new(((r * 7 + c * 3) % 5) as f64 - 2.0, ((r + 2 * c) % 3) as f64)
        });
        let pair = cartesian_decompose(&m).unwrap();
        let rebuilt = &pair.l + pair.h.map(|v| v * C64::new(0.0, 1.0));
        assert!(frobenius_distance(&rebuilt, &m) < 1e-12);
        // Both parts Hermitian.
        assert!(frobenius_distance(&pair.l.adjoint(), &pair.l) < 1e-15);
        assert!(frobenius_distance(&pair.h.adjoint(), &pair.h) < 1e-15);
    }

    #[test]
    fn kernel_value_at_origin() {
        // e^{2^0.8 - 1}/(2π), frozen from direct scalar evaluation.
        let v = kernel(C64::new(0.0, 0.0), 0.8).unwrap();
        assert!((v.re - 0.333946011990707).abs() < 1e-13);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn kernel_decays_along_real_axis() {
        let mut prev = f64::INFINITY;
        for k in [10.0, 20.0, 40.0, 80.0] {
            let v = kernel(C64::new(k, 0.0), 0.8).unwrap().norm();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        // 16-point rule is exact to degree 31; check x^6 over [0, 2].
        let (nodes, weights) = composite_gauss_legendre(0.0, 2.0, 16);
        let integral: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x.powi(6))
            .sum();
        assert!((integral - 128.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_are_conjugate_symmetric() {
        let lcu = lcu_coefficients(&cfg(1.0)).unwrap();
        let n = lcu.nodes.len();
        for j in 0..n {
            let mirrored = lcu.coefficients[n - 1 - j].conj();
            assert!((lcu.coefficients[j] - mirrored).norm() < 1e-14);
            assert!((lcu.nodes[j] + lcu.nodes[n - 1 - j]).abs() < 1e-10);
        }
    }

    #[test]
    fn one_norm_stabilizes_as_k_grows() {
        let mut norms = Vec::new();
        for k_max in [30.0, 60.0, 120.0] {
            let c = LCHSConfig::new(0.8, k_max, 2048, 8, 1.0).unwrap();
            norms.push(lcu_coefficients(&c).unwrap().one_norm);
        }
        // Doubling K changes the norm less and less: the kernel tail decays.
        assert!((norms[2] - norms[1]).abs() < (norms[1] - norms[0]).abs());
        assert!((norms[2] - norms[1]).abs() < 1e-4);
        assert!(norms[2].is_finite());
    }

    #[test]
    fn scalar_reconstruction() {
        let a = real_matrix(&[&[1.0]]);
        let r = reconstruct_propagator(&a, &cfg(1.0)).unwrap();
        assert!((r[(0, 0)].re - (-1.0f64).exp()).abs() < 1e-3);
        assert!(r[(0, 0)].im.abs() < 1e-10);
    }

    #[test]
    fn kernel_normalization_across_beta() {
        // Scalar reconstruction doubles as a normalization check of the
        // kernel: Σ c_j e^{-ik_j t} must hit e^{-t} for each β. Smaller β
        // needs a wider truncation window (slower kernel decay exponent).
        for (beta, k_max, nodes) in [(0.5, 250.0, 4096), (0.8, 60.0, 2048), (0.9, 80.0, 2048)] {
            let config = LCHSConfig::new(beta, k_max, nodes, 8, 1.0).unwrap();
            let a = real_matrix(&[&[1.0]]);
            let r = reconstruct_propagator(&a, &config).unwrap();
            let err = (r[(0, 0)].re - (-1.0f64).exp()).abs();
            assert!(err < 1e-4, "beta {beta}: normalization error {err:.3e}");
        }
    }

    #[test]
    fn identity_at_time_zero() {
        let a = real_matrix(&[&[1.0, 0.2], &[0.0, 2.0]]);
        let r = reconstruct_propagator(&a, &cfg(0.0)).unwrap();
        let eye = DMatrix::<C64>::identity(2, 2);
        assert!(frobenius_distance(&r, &eye) < 1e-3);
    }

    #[test]
    fn diagonal_psd_reconstruction() {
        let a = real_matrix(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]);
        let r = reconstruct_propagator(&a, &cfg(1.0)).unwrap();
        for (i, want) in [1.0, (-1.0f64).exp(), (-2.0f64).exp()].iter().enumerate() {
            assert!((r[(i, i)].re - want).abs() < 1e-3);
        }
    }

    #[test]
    fn rejects_non_psd_hermitian_part() {
        let a = real_matrix(&[&[-1.0]]);
        assert!(matches!(
            reconstruct_propagator(&a, &cfg(1.0)),
            Err(Error::NotPositiveSemiDefinite(_))
        ));
    }

    #[test]
    fn rejects_oversized_input() {
        let a = DMatrix::<C64>::identity(65, 65);
        assert!(matches!(
            reconstruct_propagator(&a, &cfg(1.0)),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn inhomogeneous_scalar_closed_form() {
        // dZ/dt = -Z + 1 from 0: Z(1) = 1 - e^{-1}.
        let a = real_matrix(&[&[1.0]]);
        let b = DVector::from_element(1, C64::new(1.0, 0.0));
        let z0 = DVector::from_element(1, C64::new(0.0, 0.0));
        let z = solve_inhomogeneous(&a, &b, &z0, &cfg(1.0)).unwrap();
        assert!((z[0].re - 0.632120558828558).abs() < 5e-3);
        assert!(z[0].im.abs() < 1e-9);
    }

    #[test]
    fn inhomogeneous_reduces_to_homogeneous_when_b_zero() {
        let a = real_matrix(&[&[1.0, 0.3], &[-0.3, 1.5]]);
        let b = DVector::from_element(2, C64::new(0.0, 0.0));
        let z0 = DVector::from_fn(2, |i, _| C64::new(1.0 + i as f64, 0.0));
        let config = cfg(0.7);
        let z = solve_inhomogeneous(&a, &b, &z0, &config).unwrap();
        let hom = reconstruct_propagator(&a, &config).unwrap() * &z0;
        assert!((z - hom).iter().map(|v| v.norm()).fold(0.0f64, f64::max) < 1e-12);
    }

    #[test]
    fn default_truncation_shape() {
        assert_eq!(default_truncation(1.0, 1e-3, 1.0 - 1e-12), 7.0);
        assert!(default_truncation(1.0, 1e-6, 0.5) > default_truncation(1.0, 1e-3, 0.5));
    }
}
