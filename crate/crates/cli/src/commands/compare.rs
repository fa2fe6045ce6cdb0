use std::path::Path;

use crd_core::models::compare_carleman;

use crate::config::RunConfig;
use crate::output::{fmt, CsvWriter};
use crate::CliError;

pub fn run(config_path: &Path, out: &Path, metrics_out: Option<&Path>) -> Result<(), CliError> {
    let config = RunConfig::load(config_path)?;
    let model = config.resolve_model()?;
    let solver = config.solver()?;
    let repr = config.repr()?;
    let y0 = config.initial_condition(&model.system)?;
    let ks = config.carleman.k.clone();
    if ks.is_empty() {
        return Err(CliError::config("carleman.k must list at least one order"));
    }

    let max_d = model
        .system
        .diffusion()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let cfl = solver.cfl_indicator(config.grid.n, config.grid.d, max_d);
    if cfl > 1.0 {
        eprintln!("warning: CFL indicator dt*4dn^2*maxD = {cfl:.3} exceeds 1; expect instability");
    }

    let comparison = compare_carleman(&model.system, &y0, &solver, &ks, repr)?;
    let blew_up = comparison.reference.blew_up
        || comparison.carleman.iter().any(|(_, t)| t.blew_up);

    let params = vec![
        format!("model: {}", config.network.model),
        format!("grid: n={} d={}", config.grid.n, config.grid.d),
        format!(
            "solver: dt={} t_final={} record_every={}",
            solver.dt, solver.t_final, solver.record_every
        ),
        format!("orders: {ks:?}"),
        format!("repr: {repr:?}"),
        format!("blowup: {blew_up}"),
    ];

    let mut csv = CsvWriter::new(
        &format!("compare --config {}", config_path.display()),
        &params,
    );
    csv.header("t,species,k,err_abs_inf");
    for (k, metrics) in &comparison.metrics {
        for (t_idx, &t) in metrics.times.iter().enumerate() {
            for (s, record) in metrics.per_time[t_idx].iter().enumerate() {
                csv.row(format!("{},{},{},{}", fmt(t), s + 1, k, fmt(record.abs_inf)));
            }
        }
    }
    csv.finish(out)?;
    println!("wrote {}", out.display());

    // Per-time metrics for the highest truncation order in the run.
    if let Some(path) = metrics_out {
        if let Some((k, metrics)) = comparison.metrics.last() {
            let mut csv = CsvWriter::new(
                &format!("compare --config {} (metrics)", config_path.display()),
                &params,
            );
            csv.meta(format!("k: {k}"));
            for (s, avg) in metrics.averaged_rel.iter().enumerate() {
                csv.meta(format!(
                    "species={} mean_rel_err={} excluded={}",
                    s + 1,
                    fmt(*avg),
                    metrics.excluded_total[s]
                ));
            }
            csv.header("t,species,err_abs_inf,err_rel_mean");
            for (t_idx, &t) in metrics.times.iter().enumerate() {
                for (s, record) in metrics.per_time[t_idx].iter().enumerate() {
                    csv.row(format!(
                        "{},{},{},{}",
                        fmt(t),
                        s + 1,
                        fmt(record.abs_inf),
                        fmt(record.rel_mean)
                    ));
                }
            }
            csv.finish(path)?;
            println!("wrote {}", path.display());
        }
    }

    for (k, metrics) in &comparison.metrics {
        for (s, avg) in metrics.averaged_rel.iter().enumerate() {
            println!(
                "k={k} species={}: mean |rel err| = {} (excluded {})",
                s + 1,
                fmt(*avg),
                metrics.excluded_total[s]
            );
        }
    }
    if blew_up {
        return Err(CliError::blowup(
            "a trajectory hit the blow-up cap; partial comparison written",
        ));
    }
    Ok(())
}
