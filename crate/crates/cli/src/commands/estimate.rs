use std::path::Path;

use crd_core::carleman::{assemble, embed, norm_bound, CarlemanRepr, NormBoundKind};
use crd_core::estimator::{
    dissipation_parameter, total_queries, EncodingInputs, SystemFacts, REPORT_TAG,
};
use crd_core::integrate::{solve_linear, SolverConfig};
use crd_core::lchs::{default_truncation, lcu_coefficients, LCHSConfig};
use crd_core::models::{fig2_initial_condition, gm_system, GMParams};
use crd_core::spatial::SpatialGrid;

use crate::config::{EstimateConfig, ScenarioSection};
use crate::output::{fmt, CsvWriter};
use crate::CliError;

/// Facts derived from an actual GM run: Carleman norm bound as the
/// block-encoding factor, dissipation parameter from the simulated
/// trajectory, and the stoichiometric-change sum of the rate tensor.
struct DerivedFacts {
    alpha_m: f64,
    g: f64,
    stoich_sum: f64,
}

fn derive_from_gm(section: &crate::config::ScenarioGmSection) -> Result<DerivedFacts, CliError> {
    let params = GMParams::fig2();
    let grid = SpatialGrid::new(section.n, section.d)?;
    let system = gm_system(&params, &grid)?;
    let alpha_m = norm_bound(&system, section.k, NormBoundKind::Autocatalytic);
    let network = crd_core::models::gm_reaction_network(&params)?;
    let stoich_sum: u64 = network
        .reactions()
        .iter()
        .filter(|r| r.order() >= 2)
        .map(|r| r.total_change())
        .sum();
    let carleman = assemble(&system, section.k, CarlemanRepr::Grouped)?;
    let y0 = fig2_initial_condition(&grid);
    let z0 = embed(&y0, 2, grid.total_nodes(), section.k, CarlemanRepr::Grouped)?;
    let dt = section.dt.unwrap_or(1e-3);
    let steps = (section.t_sim / dt).round().max(1.0) as usize;
    let solver = SolverConfig::new(dt, section.t_sim, steps)?;
    let trajectory = solve_linear(&carleman, &z0, &solver)?;
    let z_t = trajectory.states.last().expect("at least the initial state");
    let g = dissipation_parameter(&z0, carleman.b(), z_t, section.t_sim)?;
    Ok(DerivedFacts {
        alpha_m,
        g,
        stoich_sum: stoich_sum as f64,
    })
}

fn resolve_scenario(s: &ScenarioSection) -> Result<(EncodingInputs, SystemFacts), CliError> {
    let derived = match &s.gm {
        Some(gm) => Some(derive_from_gm(gm)?),
        None => None,
    };
    let stoich_sum = s
        .stoich_sum
        .or_else(|| derived.as_ref().map(|d| d.stoich_sum))
        .ok_or_else(|| {
            CliError::config(format!("scenario `{}`: stoich_sum or [scenario.gm] required", s.name))
        })?;
    let alpha_m = s
        .alpha_m
        .or_else(|| derived.as_ref().map(|d| d.alpha_m))
        .ok_or_else(|| {
            CliError::config(format!("scenario `{}`: alpha_m or [scenario.gm] required", s.name))
        })?;
    let g = s
        .g
        .or_else(|| derived.as_ref().map(|d| d.g))
        .ok_or_else(|| {
            CliError::config(format!("scenario `{}`: g or [scenario.gm] required", s.name))
        })?;
    let inputs = EncodingInputs {
        alpha_i: s.alpha_i,
        alpha_j_max: s.alpha_j_max,
        kbt: s.kbt,
        gamma: s.gamma,
        delta: s.delta,
        epsilon: s.epsilon,
        stoich_sum,
        gap: s.gap.unwrap_or(1.0),
        e0_estimate: s.e0_estimate.unwrap_or(0.0),
    };
    let c_one_norm = match s.c_one_norm {
        Some(v) => v,
        None => {
            // ‖c‖₁ from the quadrature at this scenario's kernel settings.
            let k_max = default_truncation(g, s.epsilon, s.beta);
            let cfg = LCHSConfig::new(s.beta, k_max, 2048, 2, s.t)?;
            lcu_coefficients(&cfg)?.one_norm
        }
    };
    let (species, varsigma, n_d) = match &s.gm {
        Some(gm) => (2, 3, SpatialGrid::new(gm.n, gm.d)?.total_nodes()),
        None => (2, 3, 1),
    };
    let facts = SystemFacts {
        alpha_m,
        t: s.t,
        g,
        beta: s.beta,
        c_one_norm,
        eps_be: s.eps_be.unwrap_or(s.epsilon),
        species,
        varsigma,
        n_d,
    };
    Ok((inputs, facts))
}

pub fn run(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let config = EstimateConfig::load(config_path)?;
    let mut csv = CsvWriter::new(
        &format!("estimate --config {}", config_path.display()),
        &[
            format!("tag: {REPORT_TAG}"),
            format!("scenarios: {}", config.scenarios.len()),
            "note: unit constants and natural logs; comparative shapes, not gate counts".into(),
        ],
    );
    csv.header(
        "name,alpha_deltaG,alpha_exp,alpha_F,K_taylor,queries_deltaG,queries_UC,queries_F,\
         error_rescale,alpha_M,g,K_lchs,eps1,queries_lchs,queries_total,be_error,\
         classical_cost,classical_cost_log10",
    );
    for scenario in &config.scenarios {
        let (inputs, facts) = resolve_scenario(scenario)?;
        let report = total_queries(&inputs, &facts)?;
        csv.row(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            scenario.name,
            fmt(report.alpha_delta_g),
            fmt(report.alpha_exp),
            fmt(report.alpha_f),
            fmt(report.k_taylor),
            fmt(report.queries_delta_g),
            fmt(report.queries_uc),
            fmt(report.queries_f),
            fmt(report.error_rescale),
            fmt(report.alpha_m),
            fmt(report.g),
            fmt(report.k_lchs),
            fmt(report.eps1),
            fmt(report.queries_lchs),
            fmt(report.queries_total),
            fmt(report.be_error),
            fmt(report.classical_cost),
            fmt(report.classical_cost_log10),
        ));
    }
    csv.finish(out)?;
    println!("wrote {} ({} scenarios)", out.display(), config.scenarios.len());
    Ok(())
}
