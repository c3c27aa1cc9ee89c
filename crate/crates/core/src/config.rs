//! JSON scenario configuration. Dimensional values are either bare SI
//! numbers or strings such as `"70 GPa"` or `"0.3 mm/s"`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws;
use crate::model::{AlphaEvaluation, BulkMaterial, DirichletLoad, FitScenario, LoadProgram, Mesh, ModelKind, NeumannLoad, Scenario};
use crate::scenarios::{self, BenchmarkOptions, LebimLawChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Stress,
    /// Stress per length (interface stiffness).
    Stiffness,
    Length,
    Time,
    Velocity,
    /// Energy per area.
    Toughness,
    /// Energy per length (gradient coefficient).
    Force,
}

const UNITS: &[(Dimension, &str, f64)] = &[
    (Dimension::Stress, "Pa", 1.0),
    (Dimension::Stress, "kPa", 1e3),
    (Dimension::Stress, "MPa", 1e6),
    (Dimension::Stress, "GPa", 1e9),
    (Dimension::Stress, "N/mm^2", 1e6),
    (Dimension::Stiffness, "Pa/m", 1.0),
    (Dimension::Stiffness, "MPa/m", 1e6),
    (Dimension::Stiffness, "GPa/m", 1e9),
    (Dimension::Stiffness, "MPa/mm", 1e9),
    (Dimension::Stiffness, "N/mm^3", 1e9),
    (Dimension::Length, "m", 1.0),
    (Dimension::Length, "mm", 1e-3),
    (Dimension::Length, "um", 1e-6),
    (Dimension::Time, "s", 1.0),
    (Dimension::Time, "ms", 1e-3),
    (Dimension::Velocity, "m/s", 1.0),
    (Dimension::Velocity, "mm/s", 1e-3),
    (Dimension::Toughness, "J/m^2", 1.0),
    (Dimension::Toughness, "N/m", 1.0),
    (Dimension::Toughness, "N/mm", 1e3),
    (Dimension::Toughness, "kJ/m^2", 1e3),
    (Dimension::Force, "N", 1.0),
    (Dimension::Force, "J/m", 1.0),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Si(f64),
    Text(String),
}

impl Quantity {
    pub fn si(&self, dim: Dimension) -> Result<f64> {
        match self {
            Quantity::Si(v) => Ok(*v),
            Quantity::Text(s) => parse_quantity(s, dim),
        }
    }
}

pub fn parse_quantity(s: &str, dim: Dimension) -> Result<f64> {
    let s = s.trim();
    let split = s.find(|c: char| c.is_whitespace()).unwrap_or(s.len());
    let (value, unit) = s.split_at(split);
    let value: f64 = value.parse().map_err(|_| Error::Config(format!("cannot parse number in '{s}'")))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Ok(value);
    }
    UNITS
        .iter()
        .find(|(d, u, _)| *d == dim && *u == unit)
        .map(|(_, _, f)| value * f)
        .ok_or_else(|| Error::Config(format!("unit '{unit}' in '{s}' is not a {dim:?} unit")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Pullpush,
    Mmf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeshConfig {
    Builtin {
        builtin: Benchmark,
        n: Option<usize>,
        bulk_layers: Option<usize>,
    },
    /// Mesh file in the serialized `Mesh` layout.
    File { path: String },
    Inline(Box<Mesh>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BulkConfig {
    pub youngs_modulus: Quantity,
    pub poisson_ratio: f64,
    pub relaxation_time: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceConfig {
    pub kappa_n: Quantity,
    /// Defaults to half of `kappa_n`.
    pub kappa_t: Option<Quantity>,
    pub a_i: Quantity,
    /// Defaults to `kappa_t / 9`.
    pub kappa_h: Option<Quantity>,
    /// Yield stress as a fraction of `sqrt(2 kappa_t a_I)`.
    pub yield_factor: Option<f64>,
    pub sigma_yield: Option<Quantity>,
    pub a0: Option<Quantity>,
    pub kappa_g: Option<Quantity>,
    #[serde(default)]
    pub lebim_law: LebimLawChoice,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    /// Speed of the benchmark's loading point.
    pub speed: Option<Quantity>,
    /// Explicit loads for inline meshes, SI.
    #[serde(default)]
    pub dirichlet: Vec<DirichletLoad>,
    #[serde(default)]
    pub neumann: Vec<NeumannLoad>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub tau: Quantity,
    pub horizon: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub name: Option<String>,
    pub model: ModelKind,
    #[serde(default)]
    pub fit_scenario: Option<u8>,
    pub mesh: MeshConfig,
    pub bulk: BulkConfig,
    pub interface: InterfaceConfig,
    #[serde(default)]
    pub load: LoadConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub lebim_alpha_at: AlphaEvaluation,
    pub snapshots: Option<Vec<usize>>,
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub model: Option<ModelKind>,
    /// `Some(None)` clears a configured fit.
    pub fit_scenario: Option<Option<FitScenario>>,
    pub tau: Option<f64>,
    pub n: Option<usize>,
    pub bulk_layers: Option<usize>,
    pub lebim_alpha_at: Option<AlphaEvaluation>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let bytes = std::fs::read(path)?;
        let text = String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))?;
        let hash = crate::output::sha256_hex(text.as_bytes());
        Ok((Self::from_json(&text)?, hash))
    }

    fn interface_data(&self) -> Result<scenarios::InterfaceData> {
        let c = &self.interface;
        let kappa_n = c.kappa_n.si(Dimension::Stiffness)?;
        let kappa_t = c.kappa_t.as_ref().map_or(Ok(0.5 * kappa_n), |q| q.si(Dimension::Stiffness))?;
        let a_i = c.a_i.si(Dimension::Toughness)?;
        let kappa_h = c.kappa_h.as_ref().map_or(Ok(kappa_t / 9.0), |q| q.si(Dimension::Stiffness))?;
        let sigma_yield = match (&c.sigma_yield, c.yield_factor) {
            (Some(_), Some(_)) => return Err(Error::Config("give either sigma_yield or yield_factor".into())),
            (Some(q), None) => q.si(Dimension::Stress)?,
            (None, Some(f)) => f * laws::sigma_t_crit(kappa_t, a_i),
            (None, None) => return Err(Error::Config("interface needs sigma_yield or yield_factor".into())),
        };
        Ok(scenarios::InterfaceData {
            kappa_n,
            kappa_t,
            a_i,
            kappa_h,
            sigma_yield,
            a0: c.a0.as_ref().map_or(Ok(0.0), |q| q.si(Dimension::Toughness))?,
            kappa_g: c.kappa_g.as_ref().map(|q| q.si(Dimension::Force)).transpose()?,
            lebim_law: c.lebim_law,
        })
    }

    /// Builds the scenario; relative mesh paths resolve against `base`.
    pub fn scenario(&self, overrides: &Overrides, base: Option<&Path>) -> Result<Scenario> {
        let model = overrides.model.unwrap_or(self.model);
        let configured_fit = self.fit_scenario.map(FitScenario::from_number).transpose()?;
        let fit = overrides.fit_scenario.unwrap_or(configured_fit);
        let fit = if model == ModelKind::Aprim { None } else { fit };
        let tau = match overrides.tau {
            Some(t) => t,
            None => self.time.tau.si(Dimension::Time)?,
        };
        let horizon = self.time.horizon.si(Dimension::Time)?;
        let bulk = BulkMaterial::new(
            self.bulk.youngs_modulus.si(Dimension::Stress)?,
            self.bulk.poisson_ratio,
            self.bulk.relaxation_time.si(Dimension::Time)?,
        )?;
        let interface = self.interface_data()?;
        let lebim_alpha_at = overrides.lebim_alpha_at.unwrap_or(self.lebim_alpha_at);

        let mut sc = match &self.mesh {
            MeshConfig::Builtin { builtin, n, bulk_layers } => {
                let defaults = match builtin {
                    Benchmark::Pullpush => BenchmarkOptions::pullpush(),
                    Benchmark::Mmf => BenchmarkOptions::mmf(),
                };
                let speed = match &self.load.speed {
                    Some(q) => q.si(Dimension::Velocity)?,
                    None => defaults.speed,
                };
                let opts = BenchmarkOptions {
                    n: overrides.n.or(*n).unwrap_or(defaults.n),
                    tau,
                    bulk_layers: overrides.bulk_layers.or(*bulk_layers).unwrap_or(defaults.bulk_layers),
                    horizon,
                    speed,
                    model,
                    fit,
                    lebim_alpha_at,
                    bulk,
                    interface,
                    snapshots: self.snapshots.clone(),
                };
                match builtin {
                    Benchmark::Pullpush => scenarios::build_pullpush_with(&opts)?,
                    Benchmark::Mmf => scenarios::build_mmf_with(&opts)?,
                }
            }
            MeshConfig::File { .. } | MeshConfig::Inline(_) => {
                let mesh = match &self.mesh {
                    MeshConfig::File { path } => {
                        let p = base.map_or_else(|| Path::new(path).to_path_buf(), |b| b.join(path));
                        serde_json::from_str(&std::fs::read_to_string(&p)?)?
                    }
                    MeshConfig::Inline(m) => (**m).clone(),
                    MeshConfig::Builtin { .. } => unreachable!(),
                };
                let (law, source_aprim) = interface.law_for(&mesh, model, fit)?;
                let load = LoadProgram::new(self.load.dirichlet.clone(), self.load.neumann.clone(), horizon, tau)?;
                let snapshots = self.snapshots.clone().unwrap_or_default();
                Scenario {
                    name: String::new(),
                    mesh,
                    bulk,
                    law,
                    source_aprim,
                    load,
                    model,
                    fit_scenario: fit,
                    lebim_alpha_at,
                    snapshots,
                }
            }
        };
        if let Some(name) = &self.name {
            sc.name = name.clone();
        }
        Ok(sc)
    }
}
