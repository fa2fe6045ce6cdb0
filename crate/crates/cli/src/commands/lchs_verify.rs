use std::path::Path;

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crd_core::lchs::{frobenius_distance, reconstruct_propagator, LCHSConfig};

use crate::output::{fmt, CsvWriter};
use crate::CliError;

type C64 = Complex<f64>;

/// Random real matrix with positive semi-definite Hermitian part
/// (smallest symmetric eigenvalue shifted to zero).
fn random_dissipative(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    let sym = (&g + g.transpose()) * 0.5;
    let min = sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    g - DMatrix::identity(dim, dim) * min
}

pub fn run(
    dim: usize,
    beta: f64,
    k_max: f64,
    nodes: usize,
    t: f64,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    if dim == 0 {
        return Err(CliError::config("dim must be >= 1"));
    }
    // Validate quadrature settings up front so bad flags exit with code 2.
    LCHSConfig::new(beta, k_max, nodes, 2, t)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_real = random_dissipative(&mut rng, dim);
    let a = a_real.map(|v| C64::new(v, 0.0));
    // Reference propagator from dense Pade exponentiation, an independent
    // route from the quadrature under test.
    let oracle = ((-&a_real) * t).exp().map(|v| C64::new(v, 0.0));

    let mut csv = CsvWriter::new(
        &format!(
            "lchs-verify --dim {dim} --beta {beta} --K {k_max} --nodes {nodes} -t {t} --seed {seed}"
        ),
        &[
            format!("dim: {dim}"),
            format!("beta: {beta}"),
            format!("K: {k_max}"),
            format!("t: {t}"),
            format!("seed: {seed}"),
        ],
    );
    csv.header("K,nodes,error_fro");

    let mut node_count = 32usize.min(nodes);
    let mut last_err;
    loop {
        let cfg = LCHSConfig::new(beta, k_max, node_count, 2, t)?;
        let reconstructed = reconstruct_propagator(&a, &cfg)?;
        last_err = frobenius_distance(&reconstructed, &oracle);
        csv.row(format!("{},{},{}", fmt(k_max), node_count, fmt(last_err)));
        if node_count >= nodes {
            break;
        }
        node_count = (node_count * 2).min(nodes);
    }
    csv.finish(out)?;
    println!(
        "wrote {} (final error_fro = {} at {} nodes)",
        out.display(),
        fmt(last_err),
        nodes
    );
    Ok(())
}
