//! `crd`: batch front end for the Carleman reaction-diffusion toolkit.
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 solver
//! blow-up (partial outputs are written and flagged), 4 resource cap
//! exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

/// Cli-level error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    message: String,
    exit: u8,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit: 2,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit: 1,
        }
    }

    pub fn blowup(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit: 3,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.exit
    }
}

impl From<crd_core::Error> for CliError {
    fn from(err: crd_core::Error) -> Self {
        let exit = match &err {
            crd_core::Error::ResourceLimit(_) => 4,
            crd_core::Error::NonFinite { .. } => 3,
            _ => 2,
        };
        Self {
            message: err.to_string(),
            exit,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

#[derive(Parser)]
#[command(
    name = "crd",
    version,
    about = "Carleman reaction-diffusion toolkit: simulate, linearize, verify, estimate"
)]
struct Cli {
    /// Worker threads for sweep cells (numeric results are unaffected).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the nonlinear reaction-diffusion system with RK4.
    Simulate {
        /// TOML run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Trajectory CSV (`t,species,node,value`).
        #[arg(long, default_value = "trajectory.csv")]
        out: PathBuf,
    },
    /// Assemble the truncated Carleman system and report its shape.
    Carleman {
        #[arg(long)]
        config: PathBuf,
        /// Truncation order.
        #[arg(short)]
        k: usize,
        /// Representation: `full` or `grouped` (defaults to the config).
        #[arg(long)]
        repr: Option<String>,
        /// Write the block sparsity pattern (`block_row,block_col,nnz`).
        #[arg(long)]
        dump_pattern: Option<PathBuf>,
    },
    /// Compare Carleman solutions against the direct RK4 reference.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Error CSV (`t,species,k,err_abs_inf`).
        #[arg(long, default_value = "err.csv")]
        out: PathBuf,
        /// Optional per-time metrics CSV (`t,species,err_abs_inf,err_rel_mean`).
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Run a parameter sweep over the GM family.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Sweep CSV
        /// (`param1,param2,species,mean_rel_err,excluded_nodes,two_equilibria,blowup`).
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Verify the LCHS propagator identity against a dense exponential.
    LchsVerify {
        /// Matrix dimension (capped at 64).
        #[arg(long)]
        dim: usize,
        /// Kernel exponent in (0, 1).
        #[arg(long)]
        beta: f64,
        /// Integration truncation K.
        #[arg(long = "K")]
        k_max: f64,
        /// Quadrature node budget; the convergence table doubles up to it.
        #[arg(long)]
        nodes: usize,
        /// Evolution time.
        #[arg(short)]
        t: f64,
        /// RNG seed for the test matrix.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Convergence CSV (`K,nodes,error_fro`).
        #[arg(long, default_value = "lchs.csv")]
        out: PathBuf,
    },
    /// Convert a free-energy table into Eyring rate constants.
    Rates {
        /// Input CSV with rows `i,j,deltaG`.
        #[arg(long = "deltaG")]
        delta_g: PathBuf,
        /// Thermal energy.
        #[arg(long)]
        kbt: f64,
        /// Also run the second-order estimators on a random diagonal pair.
        #[arg(long)]
        second_order: bool,
        /// Dimension of the generated pair (with --second-order).
        #[arg(long)]
        dim: Option<usize>,
        /// RNG seed (with --second-order).
        #[arg(long)]
        seed: Option<u64>,
        /// Rates CSV (`i,j,rate`).
        #[arg(long, default_value = "rates.csv")]
        out: PathBuf,
    },
    /// Evaluate resource-count scenarios into a report CSV.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a periodic discrete Laplacian; report or dump its spectrum.
    Laplacian {
        /// Nodes per dimension.
        #[arg(long)]
        n: usize,
        /// Spatial dimension (1..=3).
        #[arg(long)]
        d: usize,
        /// Print the exact spectral norm and a power-iteration estimate.
        #[arg(long)]
        norm: bool,
        /// Write the full spectrum (`k_1,...,k_d,eigenvalue`).
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Simulate { config, out } => commands::simulate::run(&config, &out),
        Command::Carleman {
            config,
            k,
            repr,
            dump_pattern,
        } => commands::carleman::run(&config, k, repr.as_deref(), dump_pattern.as_deref()),
        Command::Compare {
            config,
            out,
            metrics,
        } => commands::compare::run(&config, &out, metrics.as_deref()),
        Command::Sweep { config, out } => commands::sweep::run(&config, &out),
        Command::LchsVerify {
            dim,
            beta,
            k_max,
            nodes,
            t,
            seed,
            out,
        } => commands::lchs_verify::run(dim, beta, k_max, nodes, t, seed, &out),
        Command::Rates {
            delta_g,
            kbt,
            second_order,
            dim,
            seed,
            out,
        } => commands::rates::run(&delta_g, kbt, second_order, dim, seed, &out),
        Command::Estimate { config, out } => commands::estimate::run(&config, &out),
        Command::Laplacian {
            n,
            d,
            norm,
            spectrum,
        } => commands::laplacian::run(n, d, norm, spectrum.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
