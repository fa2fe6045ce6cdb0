//! Evaluation of the block-encoding constants and query-count formulas of
//! the quantum reaction-diffusion pipeline.
//!
//! Every formula is an asymptotic bound evaluated with unit constants and
//! natural logarithms (floored at 1 where a bound's log factor could turn
//! negative pre-asymptotically). Reports carry the `asymptotic-shape` tag:
//! the numbers are comparative tools, not gate counts.

use alloc::format;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::sparse::two_norm;

/// Tag attached to every report.
pub const REPORT_TAG: &str = "asymptotic-shape";

/// `max(ln x, 1)`: the unit-constant reading of a logarithmic factor.
fn ln_floor1(x: f64) -> f64 {
    x.ln().max(1.0)
}

/// Inputs of the block-encoding formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodingInputs {
    /// LCU 1-norm `max_i α(i)` of the reference Hamiltonians.
    pub alpha_i: f64,
    /// LCU 1-norm `max_j α(j)` of the target Hamiltonians.
    pub alpha_j_max: f64,
    /// Thermal energy `k_B T`.
    pub kbt: f64,
    /// Spectral-gap bound `γ > 0`.
    pub gamma: f64,
    /// Initial-state overlap bound `δ ∈ (0, 1]`.
    pub delta: f64,
    /// Target block-encoding error `ε > 0`.
    pub epsilon: f64,
    /// `Σ_{ij} |α(ij) - β(ij)|`, the stoichiometric-change sum.
    pub stoich_sum: f64,
    /// Excited-state gap constant `Δ` (recorded, informational).
    pub gap: f64,
    /// Ground-state energy estimate `Ê_0` (recorded, informational).
    pub e0_estimate: f64,
}

impl EncodingInputs {
    /// Validates positivity constraints (`γ, δ, ε > 0`, `δ <= 1`).
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha_i", self.alpha_i),
            ("alpha_j_max", self.alpha_j_max),
            ("kbt", self.kbt),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.delta > 1.0 {
            return Err(Error::Domain(format!("delta must be <= 1, got {}", self.delta)));
        }
        Ok(())
    }
}

/// Block-encoding constant of the free-energy difference:
/// `α_ΔG = max_j α(j) (1 + max_i α(i)/k_B T)`.
pub fn alpha_delta_g(inputs: &EncodingInputs) -> f64 {
    inputs.alpha_j_max * (1.0 + inputs.alpha_i / inputs.kbt)
}

/// Outputs of the exponentiation unitary cost model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcQueries {
    /// `α_exp = e^{α_ΔG/k_B T}` (infinity when the exponent overflows).
    pub alpha_exp: f64,
    /// Taylor truncation order `ceil(ln x / ln ln x)` at `x = α_ΔG/k_B T`;
    /// 1 when `x <= e`. Asymptotic shape only, nonmonotone near `x = e`.
    pub k_taylor: f64,
    /// Queries `α_ΔG ln²(1/ε)/(γδ)`.
    pub queries: f64,
}

/// Query count and constants of the rate-exponential unitary.
pub fn uc_queries(inputs: &EncodingInputs) -> Result<UcQueries> {
    inputs.validate()?;
    let a_dg = alpha_delta_g(inputs);
    let exponent = a_dg / inputs.kbt;
    let alpha_exp = if exponent > 700.0 { f64::INFINITY } else { exponent.exp() };
    let x = a_dg / inputs.kbt;
    let k_taylor = if x <= core::f64::consts::E {
        1.0
    } else {
        (x.ln() / x.ln().ln()).ceil()
    };
    let log_eps = ln_floor1(1.0 / inputs.epsilon);
    let queries = a_dg * log_eps * log_eps / (inputs.gamma * inputs.delta);
    Ok(UcQueries {
        alpha_exp,
        k_taylor,
        queries,
    })
}

/// Outputs of the reaction-rate tensor encoding cost model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FEncoding {
    /// `α_F = Σ_{ij}|α(ij) - β(ij)| · α_exp`.
    pub alpha_f: f64,
    /// Queries `α_ΔG ln(α_ΔG/k_B T) ln²(Σ|α-β|/ε)/(γδ)`.
    pub queries_f: f64,
    /// Error rescale `ε / Σ|α-β|` from the product of block encodings.
    pub error_rescale: f64,
}

/// Cost of block-encoding the stoichiometry-weighted rate tensor.
pub fn f_encoding(inputs: &EncodingInputs) -> Result<FEncoding> {
    inputs.validate()?;
    if !(inputs.stoich_sum > 0.0) {
        return Err(Error::Domain(format!(
            "stoich_sum must be positive, got {}",
            inputs.stoich_sum
        )));
    }
    let a_dg = alpha_delta_g(inputs);
    let uc = uc_queries(inputs)?;
    let alpha_f = inputs.stoich_sum * uc.alpha_exp;
    let log_ratio = ln_floor1(a_dg / inputs.kbt);
    let log_stoich = ln_floor1(inputs.stoich_sum / inputs.epsilon);
    let queries_f = a_dg * log_ratio * log_stoich * log_stoich / (inputs.gamma * inputs.delta);
    Ok(FEncoding {
        alpha_f,
        queries_f,
        error_rescale: inputs.epsilon / inputs.stoich_sum,
    })
}

/// Robust block-Hamiltonian-simulation query count `6α|t| + 9 ln(12/ε)`.
pub fn hamsim_queries(alpha: f64, t: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 12.0) {
        return Err(Error::Domain(format!(
            "hamsim epsilon must lie in (0, 12) so the log term stays positive, got {eps}"
        )));
    }
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    Ok(6.0 * alpha * t.abs() + 9.0 * (12.0 / eps).ln())
}

/// Outputs of the LCHS query model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LchsQueries {
    /// Truncation threshold `K = (ln(g/ε))^{1/β}`.
    pub k_threshold: f64,
    /// Hamiltonian-simulation tolerance `ε₁ = ε/(8 ‖c‖₁ g)`.
    pub eps1: f64,
    /// Queries `g α_M t (ln(1/ε))^{1/β}`.
    pub queries: f64,
}

/// Query count of the LCHS solve given the block-encoding factor `α_M`, the
/// dissipation parameter `g >= 1`, and the kernel 1-norm `‖c‖₁` taken from
/// the quadrature actually used.
pub fn lchs_queries(
    alpha_m: f64,
    t: f64,
    g: f64,
    eps: f64,
    beta: f64,
    c_one_norm: f64,
) -> Result<LchsQueries> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta must lie in (0, 1), got {beta}")));
    }
    if !(g >= 1.0) {
        return Err(Error::Domain(format!("dissipation parameter g must be >= 1, got {g}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if !(c_one_norm > 0.0) {
        return Err(Error::Domain(format!("‖c‖₁ must be positive, got {c_one_norm}")));
    }
    let k_threshold = (g / eps).ln().powf(1.0 / beta);
    let eps1 = eps / (8.0 * c_one_norm * g);
    let queries = g * alpha_m * t * ln_floor1(1.0 / eps).powf(1.0 / beta);
    Ok(LchsQueries {
        k_threshold,
        eps1,
        queries,
    })
}

/// System-level facts combined with the thermodynamic inputs in the final
/// product bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemFacts {
    /// Block-encoding factor `α_M >= ‖M_k‖` of the Carleman matrix.
    pub alpha_m: f64,
    /// Evolution time.
    pub t: f64,
    /// Dissipation parameter `g = (‖Z(0)‖ + t‖𝓑‖)/‖Z(t)‖`.
    pub g: f64,
    /// Kernel exponent `β`.
    pub beta: f64,
    /// `‖c‖₁` of the LCU coefficients at the report's quadrature settings.
    pub c_one_norm: f64,
    /// Block-encoding error `ε_BE` of `M_k`.
    pub eps_be: f64,
    /// Species count `S`.
    pub species: usize,
    /// Maximum reaction order `ς`.
    pub varsigma: usize,
    /// Grid nodes `n_d`.
    pub n_d: usize,
}

/// Dissipation parameter `g = (‖Z(0)‖ + t‖𝓑‖)/‖Z(t)‖` from simulated data.
pub fn dissipation_parameter(z0: &[f64], b: &[f64], z_t: &[f64], t: f64) -> Result<f64> {
    let denom = two_norm(z_t);
    if denom == 0.0 {
        return Err(Error::Domain("‖Z(t)‖ = 0; dissipation parameter undefined".into()));
    }
    Ok((two_norm(z0) + t * two_norm(b)) / denom)
}

/// Full evaluated resource report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceReport {
    /// `α_ΔG`.
    pub alpha_delta_g: f64,
    /// `α_exp`.
    pub alpha_exp: f64,
    /// `α_F`.
    pub alpha_f: f64,
    /// Taylor truncation order of the exponential.
    pub k_taylor: f64,
    /// Single-log free-energy block-encoding queries `α_ΔG ln(1/ε)/(γδ)`.
    pub queries_delta_g: f64,
    /// Rate-exponential queries (double log).
    pub queries_uc: f64,
    /// Rate-tensor queries.
    pub queries_f: f64,
    /// Error rescale `ε/Σ|α-β|`.
    pub error_rescale: f64,
    /// Carleman block-encoding factor `α_M`.
    pub alpha_m: f64,
    /// Dissipation parameter `g`.
    pub g: f64,
    /// LCHS truncation threshold `K`.
    pub k_lchs: f64,
    /// Hamiltonian-simulation tolerance `ε₁`.
    pub eps1: f64,
    /// LCHS queries.
    pub queries_lchs: f64,
    /// Total queries: exactly `queries_f · queries_lchs`.
    pub queries_total: f64,
    /// Combined block-encoding error `α_M ε_BE + α_F ε`.
    pub be_error: f64,
    /// Classical direct-solve cost `S^{ς n_d}` (infinity on overflow).
    pub classical_cost: f64,
    /// `log10` of the classical cost (always finite).
    pub classical_cost_log10: f64,
}

/// Evaluates the combined reaction-rate + RDE resource report. The total is
/// the product of the rate-tensor and LCHS query counts.
pub fn total_queries(inputs: &EncodingInputs, facts: &SystemFacts) -> Result<ResourceReport> {
    inputs.validate()?;
    let a_dg = alpha_delta_g(inputs);
    let uc = uc_queries(inputs)?;
    let fenc = f_encoding(inputs)?;
    let lchs = lchs_queries(
        facts.alpha_m,
        facts.t,
        facts.g,
        inputs.epsilon,
        facts.beta,
        facts.c_one_norm,
    )?;
    let queries_delta_g =
        a_dg * ln_floor1(1.0 / inputs.epsilon) / (inputs.gamma * inputs.delta);
    let log10_s = (facts.species.max(1) as f64).log10();
    let classical_cost_log10 = (facts.varsigma as f64) * (facts.n_d as f64) * log10_s;
    let classical_cost = if classical_cost_log10 < 308.0 {
        10.0f64.powf(classical_cost_log10)
    } else {
        f64::INFINITY
    };
    Ok(ResourceReport {
        alpha_delta_g: a_dg,
        alpha_exp: uc.alpha_exp,
        alpha_f: fenc.alpha_f,
        k_taylor: uc.k_taylor,
        queries_delta_g,
        queries_uc: uc.queries,
        queries_f: fenc.queries_f,
        error_rescale: fenc.error_rescale,
        alpha_m: facts.alpha_m,
        g: facts.g,
        k_lchs: lchs.k_threshold,
        eps1: lchs.eps1,
        queries_lchs: lchs.queries,
        queries_total: fenc.queries_f * lchs.queries,
        be_error: facts.alpha_m * facts.eps_be + fenc.alpha_f * inputs.epsilon,
        classical_cost,
        classical_cost_log10,
    })
}
