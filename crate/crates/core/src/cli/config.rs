//! TOML run configuration.
//!
//! ```toml
//! [spacecraft]
//! inertia = [250.0, 150.0, 100.0]          # principal moments, kg m^2
//!
//! [orbit]
//! altitude_m = 657000.0
//! magnetic_inclination_deg = 57.0
//! # earth_radius_m = 6371000.0
//!
//! [discretization]
//! samples_per_orbit = 100
//!
//! [weights]
//! q = [1.5e-9, 1.5e-9, 1.5e-9, 1e-3, 1e-3, 1e-3]   # diagonal, or a list of rows
//! r = [2e-3, 2e-3, 2e-3]
//! # qn = [...]
//! # assume_detectable = false
//!
//! [simulation]
//! x0 = [0.01, 0.01, 0.01, 1e-5, 1e-5, 1e-5]
//! num_orbits = 10
//! # moment_limit = 10.0
//!
//! [solver]
//! method = "gamma"                          # gamma | pi | eigen | recursion
//! # unit_circle_tol = 1e-7
//! # oracle_periods = 60
//! # oracle_tol = 1e-9
//!
//! [output]
//! directory = "out"
//! plots = false
//! ```
//!
//! [`RunConfig`] mirrors the file literally (angles in degrees). [`RunConfig::resolve`]
//! validates it and converts it into module types, which is the only place
//! degrees become radians.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{InertiaMatrix, OrbitParams, EARTH_MEAN_RADIUS, INPUT_DIM, STATE_DIM};
use crate::riccati::{SolveOptions, SolverTag, WeightConfig};

/// A matrix written either as its diagonal or as a list of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Diagonal(Vec<f64>),
    Full(Vec<Vec<f64>>),
}

impl MatrixSpec {
    fn to_matrix(&self, dim: usize, path: &str) -> Result<DMatrix<f64>> {
        match self {
            MatrixSpec::Diagonal(d) => {
                if d.len() != dim {
                    return Err(Error::config(
                        path,
                        format!("expected {dim} diagonal entries, got {}", d.len()),
                    ));
                }
                Ok(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
            }
            MatrixSpec::Full(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::config(
                        path,
                        format!("expected a {dim}x{dim} matrix"),
                    ));
                }
                Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftSection {
    pub inertia: MatrixSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub altitude_m: f64,
    pub magnetic_inclination_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub earth_radius_m: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSection {
    pub samples_per_orbit: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub q: MatrixSpec,
    pub r: MatrixSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qn: Option<MatrixSpec>,
    #[serde(default)]
    pub assume_detectable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub x0: Vec<f64>,
    pub num_orbits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_limit: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_circle_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_periods: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_tol: Option<f64>,
}

fn default_method() -> String {
    "gamma".into()
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            method: default_method(),
            unit_circle_tol: None,
            oracle_periods: None,
            oracle_tol: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default)]
    pub plots: bool,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            plots: false,
        }
    }
}

/// The configuration file as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spacecraft: SpacecraftSection,
    pub orbit: OrbitSection,
    pub discretization: DiscretizationSection,
    pub weights: WeightsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Simulation settings after validation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSettings {
    pub x0: DVector<f64>,
    pub num_orbits: usize,
    pub moment_limit: Option<f64>,
}

/// A validated configuration expressed in module types.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub inertia: InertiaMatrix,
    pub orbit: OrbitParams,
    pub samples_per_orbit: usize,
    pub weights: WeightConfig,
    pub simulation: Option<SimulationSettings>,
    pub solver: SolverTag,
    pub options: SolveOptions,
    pub output_dir: PathBuf,
    pub plots: bool,
}

fn wrap(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config { .. } => e,
        other => Error::config(path, other.to_string()),
    }
}

impl RunConfig {
    /// Parses TOML text; errors carry the dotted path of the offending key.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| Error::config(origin, e.to_string().trim_end().to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(
                if path == "." {
                    origin.to_string()
                } else {
                    path
                },
                e.into_inner().to_string().trim_end().to_string(),
            )
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config("<serialize>", e.to_string()))
    }

    pub fn resolve(&self) -> Result<Scenario> {
        let j = self.spacecraft.inertia.to_matrix(3, "spacecraft.inertia")?;
        let inertia = InertiaMatrix::new(Matrix3::from_iterator(j.iter().copied()))
            .map_err(wrap("spacecraft.inertia"))?;

        let o = &self.orbit;
        let orbit = OrbitParams::with_earth_radius(
            o.altitude_m,
            o.magnetic_inclination_deg.to_radians(),
            o.earth_radius_m.unwrap_or(EARTH_MEAN_RADIUS),
        )
        .map_err(wrap("orbit"))?;

        let p = self.discretization.samples_per_orbit;
        if p == 0 {
            return Err(Error::config(
                "discretization.samples_per_orbit",
                "must be at least 1",
            ));
        }

        let w = &self.weights;
        let q = w.q.to_matrix(STATE_DIM, "weights.q")?;
        let r = w.r.to_matrix(INPUT_DIM, "weights.r")?;
        let mut weights = WeightConfig::new(q, r).map_err(wrap("weights"))?;
        if let Some(qn) = &w.qn {
            weights = weights
                .with_terminal(qn.to_matrix(STATE_DIM, "weights.qn")?)
                .map_err(wrap("weights.qn"))?;
        }
        let weights = weights.assume_detectable(w.assume_detectable);

        let simulation = match &self.simulation {
            None => None,
            Some(s) => {
                if s.x0.len() != STATE_DIM {
                    return Err(Error::config(
                        "simulation.x0",
                        format!("expected {STATE_DIM} entries, got {}", s.x0.len()),
                    ));
                }
                if s.num_orbits == 0 {
                    return Err(Error::config("simulation.num_orbits", "must be at least 1"));
                }
                if let Some(limit) = s.moment_limit {
                    if !(limit > 0.0) {
                        return Err(Error::config("simulation.moment_limit", "must be positive"));
                    }
                }
                Some(SimulationSettings {
                    x0: DVector::from_column_slice(&s.x0),
                    num_orbits: s.num_orbits,
                    moment_limit: s.moment_limit,
                })
            }
        };

        let solver: SolverTag = self
            .solver
            .method
            .parse()
            .map_err(|e: String| Error::config("solver.method", e))?;
        let mut options = SolveOptions::default();
        if let Some(tol) = self.solver.unit_circle_tol {
            if !(tol > 0.0) {
                return Err(Error::config("solver.unit_circle_tol", "must be positive"));
            }
            options.unit_circle_tol = tol;
        }
        if let Some(n) = self.solver.oracle_periods {
            if n == 0 {
                return Err(Error::config("solver.oracle_periods", "must be at least 1"));
            }
            options.oracle_periods = n;
        }
        if let Some(tol) = self.solver.oracle_tol {
            if !(tol > 0.0) {
                return Err(Error::config("solver.oracle_tol", "must be positive"));
            }
            options.oracle_tol = tol;
        }

        Ok(Scenario {
            inertia,
            orbit,
            samples_per_orbit: p,
            weights,
            simulation,
            solver,
            options,
            output_dir: self.output.directory.clone(),
            plots: self.output.plots,
        })
    }
}

/// A config file together with its text and digest.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub raw: RunConfig,
    pub scenario: Scenario,
    /// Hex SHA-256 of the file bytes, recorded in schedule headers.
    pub hash: String,
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(origin.clone(), format!("cannot read file: {e}")))?;
    let raw = RunConfig::from_toml_str(&text, &origin)?;
    let scenario = raw.resolve()?;
    Ok(LoadedConfig {
        path: path.to_path_buf(),
        raw,
        scenario,
        hash: config_hash(&text),
    })
}
