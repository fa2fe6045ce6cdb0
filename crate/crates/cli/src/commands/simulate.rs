use std::path::Path;

use crd_core::integrate::solve_nonlinear;

use crate::config::RunConfig;
use crate::output::{fmt, CsvWriter};
use crate::CliError;

pub fn run(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let config = RunConfig::load(config_path)?;
    let model = config.resolve_model()?;
    let solver = config.solver()?;
    let y0 = config.initial_condition(&model.system)?;

    let grid = model.system.grid();
    let max_d = model
        .system
        .diffusion()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let cfl = solver.cfl_indicator(grid.n(), grid.d(), max_d);
    if cfl > 1.0 {
        eprintln!("warning: CFL indicator dt*4dn^2*maxD = {cfl:.3} exceeds 1; expect instability");
    }

    let trajectory = solve_nonlinear(&model.system, &y0, &solver)?;

    let mut csv = CsvWriter::new(
        &format!("simulate --config {}", config_path.display()),
        &[
            format!("model: {}", config.network.model),
            format!("grid: n={} d={}", grid.n(), grid.d()),
            format!(
                "solver: dt={} t_final={} record_every={}",
                solver.dt, solver.t_final, solver.record_every
            ),
            format!("cfl_indicator: {}", fmt(cfl)),
            format!("blowup: {}", trajectory.blew_up),
        ],
    );
    csv.header("t,species,node,value");
    let nodes = grid.total_nodes();
    for (t_idx, &t) in trajectory.times.iter().enumerate() {
        for species in 0..model.system.species() {
            let slice = trajectory.species_slice(t_idx, species);
            for node in 0..nodes {
                csv.row(format!("{},{},{},{}", fmt(t), species + 1, node, fmt(slice[node])));
            }
        }
    }
    csv.finish(out)?;
    println!(
        "wrote {} ({} times, {} species, {} nodes)",
        out.display(),
        trajectory.times.len(),
        model.system.species(),
        nodes
    );
    if trajectory.blew_up {
        return Err(CliError::blowup(format!(
            "state norm exceeded the blow-up cap; partial trajectory written to {}",
            out.display()
        )));
    }
    Ok(())
}
