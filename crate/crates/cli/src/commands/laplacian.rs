use std::path::Path;

use crd_core::spatial::{laplacian_eigenvalue, laplacian_nd, laplacian_norm_exact};

use crate::output::{fmt, CsvWriter};
use crate::CliError;

pub fn run(n: usize, d: usize, norm: bool, spectrum: Option<&Path>) -> Result<(), CliError> {
    let op = laplacian_nd(n, d)?;
    println!("laplacian n={n} d={d}: dim={} nnz={}", op.dim(), op.matrix().nnz());
    if norm {
        let exact = laplacian_norm_exact(n, d)?;
        let estimate = op.matrix().spectral_norm_estimate(500, 1e-13);
        println!(
            "spectral norm: exact {} (4dn^2 attained: {}), power-iteration estimate {}",
            fmt(exact.value),
            exact.bound_tight,
            fmt(estimate)
        );
    }
    if let Some(path) = spectrum {
        let mut csv = CsvWriter::new(
            &format!("laplacian --n {n} --d {d} --spectrum"),
            &[format!("n: {n}"), format!("d: {d}")],
        );
        let header: Vec<String> = (1..=d).map(|i| format!("k_{i}")).collect();
        csv.header(&format!("{},eigenvalue", header.join(",")));
        let total = n.pow(d as u32);
        for flat in 0..total {
            let mut rem = flat;
            let mut modes = vec![0usize; d];
            for slot in (0..d).rev() {
                modes[slot] = rem % n;
                rem /= n;
            }
            let lambda = laplacian_eigenvalue(n, &modes);
            let mode_text: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
            csv.row(format!("{},{}", mode_text.join(","), fmt(lambda)));
        }
        csv.finish(path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
