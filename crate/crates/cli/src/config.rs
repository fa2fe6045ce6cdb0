//! TOML run configuration. Unknown keys are rejected everywhere so a typo'd
//! experiment file fails loudly instead of silently running defaults.

use serde::Deserialize;

use crd_core::models::{GMParams, SweepAxis, SweepSpec};
use crd_core::reaction::{CoefficientTensors, Reaction, ReactionNetwork};
use crd_core::spatial::{SpatialGrid, SpatialSystem};

use crate::CliError;

/// Top-level configuration for `simulate`, `carleman`, `compare`, `sweep`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    #[serde(default)]
    pub carleman: CarlemanSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    /// One of `gm`, `gm-rescaled`, `custom`.
    pub model: String,
    #[serde(default)]
    pub gm: Option<GmSection>,
    #[serde(default, rename = "gm-rescaled")]
    pub gm_rescaled: Option<GmRescaledSection>,
    #[serde(default)]
    pub custom: Option<CustomSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmSection {
    pub d1: f64,
    pub d2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub c1: f64,
    pub b1: f64,
    pub b2: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmRescaledSection {
    pub mu1: f64,
    pub b2: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Explicit network description: per-reaction records plus sources and
/// diffusion coefficients.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSection {
    pub species: usize,
    #[serde(default)]
    pub source: Option<Vec<f64>>,
    pub diffusion: Vec<f64>,
    #[serde(default, rename = "reaction")]
    pub reactions: Vec<ReactionRecord>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionRecord {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub rate: f64,
    /// Optional 1-based tensor column pinning the reactant-monomial
    /// representative.
    #[serde(default)]
    pub position: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub d: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    #[serde(default)]
    pub blowup_cap: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlemanSection {
    /// Truncation orders, e.g. `[2, 3]`.
    #[serde(default = "default_orders")]
    pub k: Vec<usize>,
    /// `full` or `grouped`.
    #[serde(default = "default_repr")]
    pub repr: String,
}

fn default_orders() -> Vec<usize> {
    vec![2, 3]
}

fn default_repr() -> String {
    "grouped".into()
}

impl Default for CarlemanSection {
    fn default() -> Self {
        Self {
            k: default_orders(),
            repr: default_repr(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// `fig2` (default) or `constant`.
    #[serde(default)]
    pub kind: Option<String>,
    /// Per-species constant values for `kind = "constant"`.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub k: usize,
    #[serde(default)]
    pub tie_d2_to_half_d1: bool,
    #[serde(rename = "axis")]
    pub axes: Vec<AxisSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub param: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
    /// `log` (default) or `linear` when a range is given.
    #[serde(default)]
    pub scale: Option<String>,
}

impl AxisSection {
    pub fn resolve(&self) -> Result<SweepAxis, CliError> {
        let values = if let Some(values) = &self.values {
            values.clone()
        } else {
            let (min, max, points) = match (self.min, self.max, self.points) {
                (Some(a), Some(b), Some(p)) if p >= 2 && a.is_finite() && b.is_finite() => {
                    (a, b, p)
                }
                _ => {
                    return Err(CliError::config(format!(
                        "axis `{}` needs either `values` or `min`/`max`/`points >= 2`",
                        self.param
                    )))
                }
            };
            let scale = self.scale.as_deref().unwrap_or("log");
            match scale {
                "log" => {
                    if min <= 0.0 || max <= 0.0 {
                        return Err(CliError::config(format!(
                            "axis `{}`: log scale needs positive bounds",
                            self.param
                        )));
                    }
                    let (la, lb) = (min.ln(), max.ln());
                    (0..points)
                        .map(|i| (la + (lb - la) * i as f64 / (points - 1) as f64).exp())
                        .collect()
                }
                "linear" => (0..points)
                    .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
                    .collect(),
                other => {
                    return Err(CliError::config(format!(
                        "axis `{}`: unknown scale `{other}` (use `log` or `linear`)",
                        self.param
                    )))
                }
            }
        };
        Ok(SweepAxis {
            param: self.param.clone(),
            values,
        })
    }
}

/// A fully resolved model: the spatial system plus, when the network is a GM
/// variant, the parameter set that sweeps can perturb.
pub struct ResolvedModel {
    pub system: SpatialSystem,
    pub gm_params: Option<GMParams>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn grid(&self) -> Result<SpatialGrid, CliError> {
        SpatialGrid::new(self.grid.n, self.grid.d).map_err(CliError::from)
    }

    pub fn solver(&self) -> Result<crd_core::integrate::SolverConfig, CliError> {
        let mut cfg = crd_core::integrate::SolverConfig::new(
            self.solver.dt,
            self.solver.t_final,
            self.solver.record_every,
        )?;
        if let Some(cap) = self.solver.blowup_cap {
            cfg = cfg.with_blowup_cap(cap);
        }
        Ok(cfg)
    }

    pub fn repr(&self) -> Result<crd_core::carleman::CarlemanRepr, CliError> {
        parse_repr(&self.carleman.repr)
    }

    pub fn resolve_model(&self) -> Result<ResolvedModel, CliError> {
        let grid = self.grid()?;
        match self.network.model.as_str() {
            "gm" => {
                let gm = self.network.gm.as_ref().ok_or_else(|| {
                    CliError::config("model = \"gm\" requires a [network.gm] table")
                })?;
                let params = GMParams {
                    d1: gm.d1,
                    d2: gm.d2,
                    mu1: gm.mu1,
                    mu2: gm.mu2,
                    c1: gm.c1,
                    b1: gm.b1,
                    b2: gm.b2,
                };
                Ok(ResolvedModel {
                    system: crd_core::models::gm_system(&params, &grid)?,
                    gm_params: Some(params),
                })
            }
            "gm-rescaled" => {
                let gm = self.network.gm_rescaled.as_ref().ok_or_else(|| {
                    CliError::config("model = \"gm-rescaled\" requires a [network.gm-rescaled] table")
                })?;
                let params = crd_core::models::rescaled_gm(gm.mu1, gm.b2, gm.d1, gm.d2);
                Ok(ResolvedModel {
                    system: crd_core::models::gm_system(&params, &grid)?,
                    gm_params: Some(params),
                })
            }
            "custom" => {
                let custom = self.network.custom.as_ref().ok_or_else(|| {
                    CliError::config("model = \"custom\" requires a [network.custom] table")
                })?;
                let mut reactions = Vec::with_capacity(custom.reactions.len());
                for record in &custom.reactions {
                    let reaction = match record.position {
                        Some(p) => Reaction::with_position(
                            record.alpha.clone(),
                            record.beta.clone(),
                            record.rate,
                            p,
                        )?,
                        None => {
                            Reaction::new(record.alpha.clone(), record.beta.clone(), record.rate)?
                        }
                    };
                    reactions.push(reaction);
                }
                let network = ReactionNetwork::new(custom.species, reactions)?;
                let mut tensors = CoefficientTensors::from_network(&network)?;
                if let Some(source) = &custom.source {
                    tensors = tensors.with_source(source.clone())?;
                }
                let system = SpatialSystem::new(grid, custom.diffusion.clone(), tensors)?;
                Ok(ResolvedModel {
                    system,
                    gm_params: None,
                })
            }
            other => Err(CliError::config(format!(
                "unknown network.model `{other}` (use gm, gm-rescaled, custom)"
            ))),
        }
    }

    /// Initial condition vector for the resolved system.
    pub fn initial_condition(&self, system: &SpatialSystem) -> Result<Vec<f64>, CliError> {
        let kind = self.initial.kind.as_deref().unwrap_or("fig2");
        match kind {
            "fig2" => {
                if system.species() != 2 || system.grid().d() != 1 {
                    return Err(CliError::config(
                        "initial.kind = \"fig2\" needs a 2-species system on a 1-D grid",
                    ));
                }
                Ok(crd_core::models::fig2_initial_condition(system.grid()))
            }
            "constant" => {
                let values = self.initial.values.as_ref().ok_or_else(|| {
                    CliError::config("initial.kind = \"constant\" requires initial.values")
                })?;
                if values.len() != system.species() {
                    return Err(CliError::config(format!(
                        "initial.values needs one entry per species ({})",
                        system.species()
                    )));
                }
                let nd = system.grid().total_nodes();
                let mut y0 = vec![0.0; system.species() * nd];
                for (i, &v) in values.iter().enumerate() {
                    y0[i * nd..(i + 1) * nd].fill(v);
                }
                Ok(y0)
            }
            other => Err(CliError::config(format!(
                "unknown initial.kind `{other}` (use fig2 or constant)"
            ))),
        }
    }

    /// Sweep specification, validated against the GM parameter family.
    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::config("this command requires a [sweep] section"))?;
        let model = self.resolve_model()?;
        let base = model.gm_params.ok_or_else(|| {
            CliError::config("sweeps operate on the gm / gm-rescaled parameter family")
        })?;
        let axes = sweep
            .axes
            .iter()
            .map(AxisSection::resolve)
            .collect::<Result<Vec<_>, _>>()?;
        let spec = SweepSpec {
            axes,
            base,
            k: sweep.k,
            n: self.grid.n,
            dt: self.solver.dt,
            t_final: self.solver.t_final,
            record_every: self.solver.record_every,
            tie_d2_to_half_d1: sweep.tie_d2_to_half_d1,
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn parse_repr(text: &str) -> Result<crd_core::carleman::CarlemanRepr, CliError> {
    match text {
        "full" => Ok(crd_core::carleman::CarlemanRepr::Full),
        "grouped" => Ok(crd_core::carleman::CarlemanRepr::Grouped),
        other => Err(CliError::config(format!(
            "unknown representation `{other}` (use full or grouped)"
        ))),
    }
}

/// Scenario list for `estimate`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(rename = "scenario")]
    pub scenarios: Vec<ScenarioSection>,
}

impl EstimateConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: EstimateConfig =
            toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        if cfg.scenarios.is_empty() {
            return Err(CliError::config("estimate config needs at least one [[scenario]]"));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
    pub alpha_i: f64,
    pub alpha_j_max: f64,
    pub kbt: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub stoich_sum: Option<f64>,
    #[serde(default)]
    pub gap: Option<f64>,
    #[serde(default)]
    pub e0_estimate: Option<f64>,
    pub t: f64,
    pub beta: f64,
    #[serde(default)]
    pub eps_be: Option<f64>,
    /// Explicit block-encoding factor; derived from the GM run when absent.
    #[serde(default)]
    pub alpha_m: Option<f64>,
    /// Explicit dissipation parameter; derived from the GM run when absent.
    #[serde(default)]
    pub g: Option<f64>,
    /// Explicit `‖c‖₁`; computed from the quadrature when absent.
    #[serde(default)]
    pub c_one_norm: Option<f64>,
    /// Optional GM run supplying `alpha_m`, `g`, and `stoich_sum`.
    #[serde(default)]
    pub gm: Option<ScenarioGmSection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioGmSection {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    /// Simulation horizon used for the dissipation parameter.
    pub t_sim: f64,
    #[serde(default)]
    pub dt: Option<f64>,
}
