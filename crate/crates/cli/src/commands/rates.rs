use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crd_core::rates::{
    rates_from_table, zwanzig_exact, zwanzig_second_order, zwanzig_second_order_literal,
    HamiltonianPair, Reference, ThermoContext,
};

use crate::output::{fmt, CsvWriter};
use crate::CliError;

/// Parses a `i,j,deltaG` table, skipping `#` comments and a header line.
fn read_delta_g_table(path: &Path) -> Result<BTreeMap<(u32, u32), f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut table = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(CliError::config(format!(
                "{}:{}: expected `i,j,deltaG`, got `{line}`",
                path.display(),
                lineno + 1
            )));
        }
        let parsed: Option<((u32, u32), f64)> = (|| {
            let i = fields[0].parse().ok()?;
            let j = fields[1].parse().ok()?;
            let dg = fields[2].parse().ok()?;
            Some(((i, j), dg))
        })();
        match parsed {
            Some((key, dg)) => {
                table.insert(key, dg);
            }
            None if lineno == 0 => continue, // header row
            None => {
                return Err(CliError::config(format!(
                    "{}:{}: cannot parse `{line}`",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(table)
}

pub fn run(
    delta_g_path: &Path,
    kbt: f64,
    second_order: bool,
    dim: Option<usize>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    let ctx = ThermoContext::new(kbt)?;
    let table = read_delta_g_table(delta_g_path)?;
    let rates = rates_from_table(&table, &ctx)?;

    let mut csv = CsvWriter::new(
        &format!(
            "rates --deltaG {} --kbt {kbt}{}",
            delta_g_path.display(),
            if second_order { " --second-order" } else { "" }
        ),
        &[format!("kbt: {kbt}"), format!("entries: {}", rates.len())],
    );

    if second_order {
        // Demonstration pair: random commuting (diagonal) Hamiltonians with a
        // weak perturbation; all estimators are reported in the metadata.
        let dim = dim.unwrap_or(8).clamp(2, 64);
        let seed = seed.unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e_i: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..2.0)).collect();
        let e_j: Vec<f64> = e_i.iter().map(|&e| e + rng.gen_range(-0.3..0.3)).collect();
        let pair = HamiltonianPair::diagonal(&e_i, &e_j)?;
        let exact = zwanzig_exact(&pair, &ctx)?;
        let thermal = zwanzig_second_order(&pair, &ctx, Reference::Thermal)?;
        let ground = zwanzig_second_order(&pair, &ctx, Reference::GroundState);
        let literal = zwanzig_second_order_literal(&pair, &ctx);
        csv.meta(format!("second_order: dim={dim} seed={seed}"));
        csv.meta(format!("deltaG_exact: {}", fmt(exact)));
        csv.meta(format!("deltaG_second_order_thermal: {}", fmt(thermal)));
        match ground {
            Ok(v) => csv.meta(format!("deltaG_second_order_groundstate: {}", fmt(v))),
            Err(e) => csv.meta(format!("deltaG_second_order_groundstate: refused ({e})")),
        }
        match literal {
            Ok(v) => csv.meta(format!("deltaG_second_order_literal: {}", fmt(v))),
            Err(e) => csv.meta(format!("deltaG_second_order_literal: refused ({e})")),
        }
        csv.meta(format!(
            "second_order_rate_0_1: {}",
            fmt(crd_core::rates::eyring_rate(thermal, &ctx)?)
        ));
    }

    csv.header("i,j,rate");
    for ((i, j), rate) in &rates {
        csv.row(format!("{i},{j},{}", fmt(*rate)));
    }
    csv.finish(out)?;
    println!("wrote {} ({} rates)", out.display(), rates.len());
    Ok(())
}
