use std::path::Path;

use crd_core::carleman::{assemble, norm_bound, NormBoundKind};

use crate::config::{parse_repr, RunConfig};
use crate::output::{fmt, CsvWriter};
use crate::CliError;

pub fn run(
    config_path: &Path,
    k: usize,
    repr_flag: Option<&str>,
    dump_pattern: Option<&Path>,
) -> Result<(), CliError> {
    let config = RunConfig::load(config_path)?;
    let model = config.resolve_model()?;
    let repr = match repr_flag {
        Some(text) => parse_repr(text)?,
        None => config.repr()?,
    };
    let system = assemble(&model.system, k, repr)?;
    let bound = norm_bound(&model.system, k, NormBoundKind::General);
    let estimate = system.matrix().spectral_norm_estimate(300, 1e-12);
    println!(
        "carleman k={k} repr={repr:?}: dim={} nnz={} blocks={}",
        system.dim(),
        system.nnz(),
        system.k()
    );
    println!("norm bound {} >= power-iteration estimate {}", fmt(bound), fmt(estimate));
    println!(
        "block upper-triangular: {}",
        system.is_block_upper_triangular()
    );

    if let Some(path) = dump_pattern {
        let mut csv = CsvWriter::new(
            &format!("carleman --config {} -k {k}", config_path.display()),
            &[
                format!("model: {}", config.network.model),
                format!("repr: {repr:?}"),
                format!("dim: {}", system.dim()),
                format!("norm_bound: {}", fmt(bound)),
                format!("norm_estimate: {}", fmt(estimate)),
            ],
        );
        csv.header("block_row,block_col,nnz");
        for (r, c, nnz) in system.block_pattern() {
            csv.row(format!("{r},{c},{nnz}"));
        }
        csv.finish(path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
