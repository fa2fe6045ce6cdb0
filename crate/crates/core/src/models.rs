//! Gierer-Meinhardt activator-inhibitor model, its rescaled form, and the
//! comparison/sweep harnesses behind the convergence experiments.
//!
//! The GM right-hand side is
//! `dy1/dt = D1 Δ y1 - μ1 y1 + c1 y1² y2 + b1` and
//! `dy2/dt = D2 Δ y2 - μ2 y2 - c1 y1² y2 + b2`; the cubic term is the
//! autocatalytic reaction `2y1 + y2 -> 3y1` and the decays are first-order
//! consumption, so the coefficient tensors come straight from mass action.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use crate::carleman::{assemble, CarlemanRepr};
use crate::error::{Error, Result};
use crate::integrate::{error_metrics, solve_linear, solve_nonlinear, SolverConfig, Trajectory};
use crate::reaction::{CoefficientTensors, Reaction, ReactionNetwork};
use crate::spatial::{SpatialGrid, SpatialSystem};

/// Gierer-Meinhardt parameters (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GMParams {
    /// Activator diffusion coefficient.
    pub d1: f64,
    /// Inhibitor diffusion coefficient.
    pub d2: f64,
    /// Activator decay rate.
    pub mu1: f64,
    /// Inhibitor decay rate.
    pub mu2: f64,
    /// Cubic autocatalysis rate.
    pub c1: f64,
    /// Activator source.
    pub b1: f64,
    /// Inhibitor source.
    pub b2: f64,
}

impl GMParams {
    /// Validates positivity of the diffusion coefficients and finiteness.
    pub fn validate(&self) -> Result<()> {
        if !(self.d1 > 0.0) || !(self.d2 > 0.0) {
            return Err(Error::Domain(format!(
                "diffusion coefficients must be positive, got D1={}, D2={}",
                self.d1, self.d2
            )));
        }
        for (name, v) in [
            ("mu1", self.mu1),
            ("mu2", self.mu2),
            ("c1", self.c1),
            ("b1", self.b1),
            ("b2", self.b2),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("parameter {name} must be finite, got {v}")));
            }
        }
        if self.c1 < 0.0 {
            return Err(Error::Domain(format!("c1 must be >= 0, got {}", self.c1)));
        }
        Ok(())
    }

    /// The Fig.-2 stable-regime parameter set.
    pub fn fig2() -> Self {
        Self {
            d1: 1e-4,
            d2: 5e-5,
            mu1: 5.0,
            mu2: 5.0,
            c1: 1.0,
            b1: 1.0,
            b2: 0.0,
        }
    }
}

/// Rescaled GM with `μ2 = 1`, `c1 = 1`, `b1 = 0`.
pub fn rescaled_gm(mu1: f64, b2: f64, d1: f64, d2: f64) -> GMParams {
    GMParams {
        d1,
        d2,
        mu1,
        mu2: 1.0,
        c1: 1.0,
        b1: 0.0,
        b2,
    }
}

/// Whether the rescaled GM admits two equilibrium points: `0 < μ1/b2 < 2`.
pub fn has_two_equilibria(mu1: f64, b2: f64) -> Result<bool> {
    if b2 == 0.0 {
        return Err(Error::Domain("equilibrium criterion needs b2 != 0".into()));
    }
    let ratio = mu1 / b2;
    Ok(ratio > 0.0 && ratio < 2.0)
}

/// Mass-action reaction network of the GM model: first-order decays plus the
/// cubic autocatalytic step `2y1 + y2 -> 3y1` (rates of zero are omitted).
pub fn gm_reaction_network(params: &GMParams) -> Result<ReactionNetwork> {
    params.validate()?;
    let mut reactions = Vec::new();
    if params.mu1 != 0.0 {
        reactions.push(Reaction::new(vec![1, 0], vec![0, 0], params.mu1)?);
    }
    if params.mu2 != 0.0 {
        reactions.push(Reaction::new(vec![0, 1], vec![0, 0], params.mu2)?);
    }
    if params.c1 != 0.0 {
        reactions.push(Reaction::new(vec![2, 1], vec![3, 0], params.c1)?);
    }
    ReactionNetwork::new(2, reactions)
}

/// The GM model discretized on a grid, as coefficient tensors plus diffusion.
pub fn gm_system(params: &GMParams, grid: &SpatialGrid) -> Result<SpatialSystem> {
    let network = gm_reaction_network(params)?;
    let tensors = CoefficientTensors::from_network(&network)?
        .with_source(vec![params.b1, params.b2])?;
    SpatialSystem::new(*grid, vec![params.d1, params.d2], tensors)
}

/// Fig.-2 initial condition `[1 + sin(2π x_i), 1 + cos(4π x_i)]` with
/// `x_i = i/n`, species-major over the 1-D grid.
pub fn fig2_initial_condition(grid: &SpatialGrid) -> Vec<f64> {
    let nd = grid.total_nodes();
    let mut y0 = vec![0.0; 2 * nd];
    for p in 0..nd {
        let x = grid.coords(p)[0];
        y0[p] = 1.0 + (2.0 * core::f64::consts::PI * x).sin();
        y0[nd + p] = 1.0 + (4.0 * core::f64::consts::PI * x).cos();
    }
    y0
}

/// Result of comparing grouped Carleman solutions against the direct RK4
/// reference for a list of truncation orders.
#[derive(Debug, Clone)]
pub struct Comparison {
    /// The direct nonlinear reference trajectory.
    pub reference: Trajectory,
    /// One extracted trajectory per requested truncation order.
    pub carleman: Vec<(usize, Trajectory)>,
    /// Metrics of each Carleman trajectory against the reference.
    pub metrics: Vec<(usize, crate::integrate::ErrorMetrics)>,
}

/// Runs the direct solver and the Carleman solver at each order in `ks`,
/// extracting the first block for comparison.
pub fn compare_carleman(
    system: &SpatialSystem,
    y0: &[f64],
    cfg: &SolverConfig,
    ks: &[usize],
    repr: CarlemanRepr,
) -> Result<Comparison> {
    let reference = solve_nonlinear(system, y0, cfg)?;
    let species = system.species();
    let nodes = system.grid().total_nodes();
    let mut carleman = Vec::with_capacity(ks.len());
    let mut metrics = Vec::with_capacity(ks.len());
    for &k in ks {
        let linear = assemble(system, k, repr)?;
        let z0 = crate::carleman::embed(y0, species, nodes, k, repr)?;
        let traj = solve_linear(&linear, &z0, cfg)?;
        let extracted = Trajectory {
            times: traj.times.clone(),
            states: traj
                .states
                .iter()
                .map(|z| linear.extract(z).map(|s| s.to_vec()))
                .collect::<Result<Vec<_>>>()?,
            species,
            nodes,
            blew_up: traj.blew_up,
            meta: traj.meta.clone(),
        };
        if !extracted.blew_up {
            metrics.push((k, error_metrics(&extracted, &reference)?));
        }
        carleman.push((k, extracted));
    }
    Ok(Comparison {
        reference,
        carleman,
        metrics,
    })
}

/// Configuration of the Fig.-2 experiment (caption parameters are fixed; the
/// horizon and recording stride are the configurable pieces the caption does
/// not state).
#[derive(Debug, Clone, Copy)]
pub struct Fig2Config {
    /// Nodes on the 1-D grid.
    pub n: usize,
    /// Time step.
    pub dt: f64,
    /// Horizon.
    pub t_final: f64,
    /// Recording stride.
    pub record_every: usize,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            n: 50,
            dt: 1e-3,
            t_final: 1.0,
            record_every: 10,
        }
    }
}

/// Runs the Fig.-2 experiment: RK4-GM vs grouped Carleman-GM at `k = 2, 3`.
pub fn fig2_experiment(cfg: &Fig2Config) -> Result<Comparison> {
    let params = GMParams::fig2();
    let grid = SpatialGrid::new(cfg.n, 1)?;
    let system = gm_system(&params, &grid)?;
    let y0 = fig2_initial_condition(&grid);
    let solver = SolverConfig::new(cfg.dt, cfg.t_final, cfg.record_every)?;
    compare_carleman(&system, &y0, &solver, &[2, 3], CarlemanRepr::Grouped)
}

/// A parameter axis of a sweep.
#[derive(Debug, Clone)]
pub struct SweepAxis {
    /// One of `c1`, `mu1`, `mu2`, `b1`, `b2`, `D1`, `D2`.
    pub param: String,
    /// Grid values, finite and non-empty.
    pub values: Vec<f64>,
}

/// Sweep specification: one or two axes over GM parameters.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Swept axes (1 or 2).
    pub axes: Vec<SweepAxis>,
    /// Parameters held fixed.
    pub base: GMParams,
    /// Truncation order used for the reported error (the largest order of
    /// the compare pipeline).
    pub k: usize,
    /// Grid nodes (1-D).
    pub n: usize,
    /// Solver settings.
    pub dt: f64,
    /// Horizon.
    pub t_final: f64,
    /// Recording stride.
    pub record_every: usize,
    /// When sweeping `D1`, tie `D2 = D1/2` (the rescaled-model slices).
    pub tie_d2_to_half_d1: bool,
}

impl SweepSpec {
    /// Validates axis names, counts, and value grids.
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Domain(format!(
                "sweep needs 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            if axis.values.is_empty() {
                return Err(Error::Domain(format!("axis {} has no values", axis.param)));
            }
            if axis.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("axis {} has non-finite values", axis.param)));
            }
            set_param(&mut self.base.clone(), &axis.param, 1.0)?;
        }
        Ok(())
    }

    /// Enumerates all cells in row-major axis order.
    pub fn cells(&self) -> Result<Vec<SweepCell>> {
        self.validate()?;
        let mut cells = Vec::new();
        let a0 = &self.axes[0];
        for &v0 in &a0.values {
            if self.axes.len() == 2 {
                for &v1 in &self.axes[1].values {
                    cells.push(self.cell(v0, Some(v1))?);
                }
            } else {
                cells.push(self.cell(v0, None)?);
            }
        }
        Ok(cells)
    }

    fn cell(&self, v0: f64, v1: Option<f64>) -> Result<SweepCell> {
        let mut params = self.base;
        set_param(&mut params, &self.axes[0].param, v0)?;
        if let Some(v1) = v1 {
            set_param(&mut params, &self.axes[1].param, v1)?;
        }
        if self.tie_d2_to_half_d1 {
            params.d2 = params.d1 / 2.0;
        }
        Ok(SweepCell {
            value0: v0,
            value1: v1,
            params,
        })
    }
}

fn set_param(params: &mut GMParams, name: &str, value: f64) -> Result<()> {
    match name {
        "c1" => params.c1 = value,
        "mu1" => params.mu1 = value,
        "mu2" => params.mu2 = value,
        "b1" => params.b1 = value,
        "b2" => params.b2 = value,
        "D1" | "d1" => params.d1 = value,
        "D2" | "d2" => params.d2 = value,
        other => return Err(Error::Domain(format!("unknown sweep parameter `{other}`"))),
    }
    Ok(())
}

/// One sweep grid point.
#[derive(Debug, Clone, Copy)]
pub struct SweepCell {
    /// First-axis value.
    pub value0: f64,
    /// Second-axis value, if the sweep is 2-D.
    pub value1: Option<f64>,
    /// Fully resolved parameters of this cell.
    pub params: GMParams,
}

/// Per-species outcome of one sweep cell.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    /// First-axis value.
    pub value0: f64,
    /// Second-axis value, if any.
    pub value1: Option<f64>,
    /// Species index (1-based).
    pub species: usize,
    /// Domain-and-time averaged `|relative error|` (NaN on blow-up).
    pub mean_rel_err: f64,
    /// Excluded (node, time) pairs for this species.
    pub excluded_nodes: usize,
    /// Two-equilibria flag of the cell parameters (false when `b2 = 0`).
    pub two_equilibria: bool,
    /// Whether either solver hit the blow-up cap.
    pub blowup: bool,
}

/// Runs one sweep cell: compare pipeline at order `spec.k`, Fig.-2 initial
/// condition, grouped representation.
pub fn run_sweep_cell(spec: &SweepSpec, cell: &SweepCell) -> Result<Vec<SweepRow>> {
    let grid = SpatialGrid::new(spec.n, 1)?;
    let system = gm_system(&cell.params, &grid)?;
    let y0 = fig2_initial_condition(&grid);
    let solver = SolverConfig::new(spec.dt, spec.t_final, spec.record_every)?;
    let comparison = compare_carleman(&system, &y0, &solver, &[spec.k], CarlemanRepr::Grouped)?;
    let two_eq = if cell.params.b2 == 0.0 {
        false
    } else {
        has_two_equilibria(cell.params.mu1, cell.params.b2)?
    };
    let blowup =
        comparison.reference.blew_up || comparison.carleman.iter().any(|(_, t)| t.blew_up);
    let mut rows = Vec::with_capacity(2);
    for species in 0..2 {
        let (mean, excluded) = if blowup {
            (f64::NAN, 0)
        } else {
            let metrics = &comparison.metrics[0].1;
            (metrics.averaged_rel[species], metrics.excluded_total[species])
        };
        rows.push(SweepRow {
            value0: cell.value0,
            value1: cell.value1,
            species: species + 1,
            mean_rel_err: mean,
            excluded_nodes: excluded,
            two_equilibria: two_eq,
            blowup,
        });
    }
    Ok(rows)
}

/// Runs every cell sequentially in enumeration order. Cell execution is a
/// pure function of the spec, so callers may instead schedule
/// [`run_sweep_cell`] over [`SweepSpec::cells`] in parallel and reassemble
/// rows by cell index.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for cell in spec.cells()? {
        rows.extend(run_sweep_cell(spec, &cell)?);
    }
    Ok(rows)
}
