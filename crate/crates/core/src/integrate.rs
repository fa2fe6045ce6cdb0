//! Fixed-step RK4 time stepping for the nonlinear RDE and the linear
//! Carleman system, plus the error metrics used to compare trajectories.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::carleman::CarlemanSystem;
use crate::error::{Error, Result};
use crate::sparse::inf_norm_vec;
use crate::spatial::SpatialSystem;

/// Relative-error denominators below this are excluded (and counted).
pub const REL_ERR_GUARD: f64 = 1e-12;

/// Fixed-step solver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Time step.
    pub dt: f64,
    /// Integration horizon.
    pub t_final: f64,
    /// Record every this many steps (the initial state is always recorded).
    pub record_every: usize,
    /// Abort threshold on the state infinity norm.
    pub blowup_cap: f64,
}

impl SolverConfig {
    /// Validates `dt > 0`, `t_final >= dt`, and a positive recording stride.
    pub fn new(dt: f64, t_final: f64, record_every: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if !(t_final >= dt) || !t_final.is_finite() {
            return Err(Error::Domain(format!(
                "t_final must be at least one step (dt = {dt}), got {t_final}"
            )));
        }
        if record_every == 0 {
            return Err(Error::Domain("record_every must be >= 1".into()));
        }
        Ok(Self {
            dt,
            t_final,
            record_every,
            blowup_cap: 1e12,
        })
    }

    /// Overrides the blow-up cap.
    pub fn with_blowup_cap(mut self, cap: f64) -> Self {
        self.blowup_cap = cap;
        self
    }

    /// Number of RK4 steps.
    pub fn steps(&self) -> usize {
        // Round so that t_final = steps * dt up to float noise.
        (self.t_final / self.dt + 0.5) as usize
    }

    /// CFL-style stiffness indicator `dt · 4dn² max_i D_i`; values above 1
    /// signal an unstable explicit diffusion step.
    pub fn cfl_indicator(&self, n: usize, d: usize, max_diffusion: f64) -> f64 {
        self.dt * 4.0 * d as f64 * (n * n) as f64 * max_diffusion
    }
}

/// A recorded time series of state vectors.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Recorded times, strictly increasing, starting at 0.
    pub times: Vec<f64>,
    /// One state vector per recorded time.
    pub states: Vec<Vec<f64>>,
    /// Species count of the recorded layout.
    pub species: usize,
    /// Nodes per species of the recorded layout.
    pub nodes: usize,
    /// Whether integration stopped early at the blow-up cap.
    pub blew_up: bool,
    /// Provenance string (solver and grid parameters).
    pub meta: String,
}

impl Trajectory {
    /// State slice for one species at a recorded index.
    pub fn species_slice(&self, time_idx: usize, species: usize) -> &[f64] {
        &self.states[time_idx][species * self.nodes..(species + 1) * self.nodes]
    }
}

/// One RK4 step `y + (h/6)(k1 + 2k2 + 2k3 + k4)` for `dy/dt = f(t, y)`.
///
/// Returns an error if the right-hand side produces a non-finite value.
pub fn rk4_step<F>(f: F, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step size must be positive, got {h}")));
    }
    let n = y.len();
    let k1 = f(t, y);
    let mut stage = vec![0.0; n];
    for i in 0..n {
        stage[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &stage);
    for i in 0..n {
        stage[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &stage);
    for i in 0..n {
        stage[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, &stage);
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if !out[i].is_finite() {
            return Err(Error::NonFinite { t: t + h });
        }
    }
    Ok(out)
}

/// Shared fixed-step driver. `rhs` writes `f(y)` into its second argument
/// (all systems here are autonomous).
fn drive<F>(
    mut y: Vec<f64>,
    cfg: &SolverConfig,
    species: usize,
    nodes: usize,
    meta: String,
    mut rhs: F,
) -> Result<Trajectory>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let dim = y.len();
    let steps = cfg.steps();
    let mut times = Vec::with_capacity(steps / cfg.record_every + 1);
    let mut states = Vec::with_capacity(steps / cfg.record_every + 1);
    times.push(0.0);
    states.push(y.clone());
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];
    let mut blew_up = false;
    let h = cfg.dt;
    for step in 0..steps {
        rhs(&y, &mut k1);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs(&stage, &mut k2);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs(&stage, &mut k3);
        for i in 0..dim {
            stage[i] = y[i] + h * k3[i];
        }
        rhs(&stage, &mut k4);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = (step + 1) as f64 * h;
        let norm = inf_norm_vec(&y);
        if !norm.is_finite() {
            return Err(Error::NonFinite { t });
        }
        if norm > cfg.blowup_cap {
            blew_up = true;
            times.push(t);
            states.push(y.clone());
            break;
        }
        if (step + 1) % cfg.record_every == 0 {
            times.push(t);
            states.push(y.clone());
        }
    }
    Ok(Trajectory {
        times,
        states,
        species,
        nodes,
        blew_up,
        meta,
    })
}

/// RK4 on the nonlinear RDE `dY/dt = Σ_j F_j Y^{⊗j} (node-wise) + D Δ Y`.
pub fn solve_nonlinear(system: &SpatialSystem, y0: &[f64], cfg: &SolverConfig) -> Result<Trajectory> {
    if y0.len() != system.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            got: y0.len(),
        });
    }
    let meta = format!(
        "solver=rk4-nonlinear n={} d={} dt={} t_final={}",
        system.grid().n(),
        system.grid().d(),
        cfg.dt,
        cfg.t_final
    );
    drive(
        y0.to_vec(),
        cfg,
        system.species(),
        system.grid().total_nodes(),
        meta,
        |y, out| system.rhs(y, out),
    )
}

/// RK4 on the linear Carleman system `dZ/dt = M Z + b`.
pub fn solve_linear(system: &CarlemanSystem, z0: &[f64], cfg: &SolverConfig) -> Result<Trajectory> {
    if z0.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            got: z0.len(),
        });
    }
    let matrix = system.matrix();
    let b = system.b();
    let meta = format!(
        "solver=rk4-carleman k={} repr={:?} dim={} dt={} t_final={}",
        system.k(),
        system.repr(),
        system.dim(),
        cfg.dt,
        cfg.t_final
    );
    drive(z0.to_vec(), cfg, 1, system.dim(), meta, |z, out| {
        matrix.matvec_into(z, out);
        for i in 0..out.len() {
            out[i] += b[i];
        }
    })
}

/// Per-time, per-species error record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeciesErrors {
    /// `‖a - b‖_∞` over nodes.
    pub abs_inf: f64,
    /// Mean of `|(a - b)/b|` over included nodes.
    pub rel_mean: f64,
    /// Nodes excluded by the small-denominator guard at this time.
    pub excluded: usize,
}

/// Error metrics between two trajectories on matching time grids.
#[derive(Debug, Clone)]
pub struct ErrorMetrics {
    /// Recorded times.
    pub times: Vec<f64>,
    /// `per_time[t][s]` is the record for species `s` at time index `t`.
    pub per_time: Vec<Vec<SpeciesErrors>>,
    /// Domain-and-time average of `|relative error|` per species.
    pub averaged_rel: Vec<f64>,
    /// Total excluded (node, time) pairs per species.
    pub excluded_total: Vec<usize>,
}

/// Compares trajectory `a` against reference `b` (relative errors are
/// directional with `b` as the denominator; absolute errors are symmetric).
/// Denominators smaller than [`REL_ERR_GUARD`] are excluded and counted.
pub fn error_metrics(a: &Trajectory, b: &Trajectory) -> Result<ErrorMetrics> {
    if a.times.len() != b.times.len() {
        return Err(Error::DimensionMismatch {
            expected: b.times.len(),
            got: a.times.len(),
        });
    }
    if a.species != b.species || a.nodes != b.nodes {
        return Err(Error::DimensionMismatch {
            expected: b.species * b.nodes,
            got: a.species * a.nodes,
        });
    }
    for (&ta, &tb) in a.times.iter().zip(&b.times) {
        if (ta - tb).abs() > 1e-9 * tb.abs().max(1.0) {
            return Err(Error::Domain(format!("time grids differ: {ta} vs {tb}")));
        }
    }
    let species = a.species;
    let mut per_time = Vec::with_capacity(a.times.len());
    let mut rel_sum = vec![0.0f64; species];
    let mut rel_count = vec![0usize; species];
    let mut excluded_total = vec![0usize; species];
    for t_idx in 0..a.times.len() {
        let mut row = Vec::with_capacity(species);
        for s in 0..species {
            let xa = a.species_slice(t_idx, s);
            let xb = b.species_slice(t_idx, s);
            let mut abs_inf = 0.0f64;
            let mut rel_acc = 0.0f64;
            let mut included = 0usize;
            let mut excluded = 0usize;
            for (ya, yb) in xa.iter().zip(xb) {
                let diff = (ya - yb).abs();
                abs_inf = abs_inf.max(diff);
                if yb.abs() < REL_ERR_GUARD {
                    excluded += 1;
                } else {
                    rel_acc += diff / yb.abs();
                    included += 1;
                }
            }
            rel_sum[s] += rel_acc;
            rel_count[s] += included;
            excluded_total[s] += excluded;
            row.push(SpeciesErrors {
                abs_inf,
                rel_mean: if included > 0 { rel_acc / included as f64 } else { f64::NAN },
                excluded,
            });
        }
        per_time.push(row);
    }
    let averaged_rel = rel_sum
        .iter()
        .zip(&rel_count)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { f64::NAN })
        .collect();
    Ok(ErrorMetrics {
        times: a.times.clone(),
        per_time,
        averaged_rel,
        excluded_total,
    })
}
