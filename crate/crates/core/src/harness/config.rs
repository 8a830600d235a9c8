//! Experiment configs.
//!
//! Configs are TOML. Lengths are in the same units as the grid spacing, times
//! in the units of `t_final`, and every section rejects unknown keys. A
//! minimal config:
//!
//! ```toml
//! name = "vortex"
//! experiment = "mms_convergence"
//! resolutions = [32, 64, 128]
//! t_final = 0.25        # time units
//! save_every = 0.0025   # time units
//! seed = 7
//!
//! [grid]
//! dim = 2
//! length = [1.0, 1.0]   # length units, per axis
//! boundary = ["periodic", "periodic"]
//!
//! [fluid.viscosity]
//! mu = 0.02
//! eta = 0.0
//! beta = 0.0
//!
//! [fluid.law]
//! a = 1.0
//! gamma = 1.6666666666666667
//! rho_bar = 1.0
//!
//! [pair]
//! family = "periodic_vortex"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fields::{BoundaryKind, Grid};
use crate::relentropy::PairSpec;
use crate::solver::{FluidParams, SchemeOptions};

/// Box geometry; the cell count comes from the resolution list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    /// Extent per axis. Defaults to the unit box.
    #[serde(default)]
    pub length: Option<Vec<f64>>,
    #[serde(default)]
    pub origin: Option<Vec<f64>>,
    /// One kind per axis, applied to both of its sides.
    pub boundary: Vec<BoundaryKind>,
}

impl GridSpec {
    /// The grid with `n` cells along every axis.
    pub fn build(&self, n: usize) -> Result<Grid> {
        let d = self.dim;
        let length = self.length.clone().unwrap_or_else(|| vec![1.0; d]);
        let origin = self.origin.clone().unwrap_or_else(|| vec![0.0; d]);
        if length.len() != d || origin.len() != d || self.boundary.len() != d {
            return Err(Error::Config(format!(
                "grid of dimension {d} needs {d} entries in length, origin and boundary"
            )));
        }
        let spacing: Vec<f64> = length.iter().map(|l| l / n as f64).collect();
        let boundary: Vec<[BoundaryKind; 2]> = self.boundary.iter().map(|k| [*k, *k]).collect();
        Grid::new(d, &vec![n; d], &spacing, &origin, &boundary)
    }
}

/// Perturbations of the initial data for the weak-strong experiment.
///
/// Members `0..calibration` calibrate `K`; the next `held_out` are checked
/// against the frozen `gronwall_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "default_members")]
    pub calibration: usize,
    #[serde(default = "default_members")]
    pub held_out: usize,
}

fn default_members() -> usize {
    4
}

impl Default for Perturbation {
    fn default() -> Self {
        Self {
            amplitude: 0.0,
            calibration: default_members(),
            held_out: default_members(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KornSettings {
    #[serde(default = "default_korn_samples")]
    pub samples: usize,
    /// The ensemble is drawn once per seed; defaults to `[seed, seed + 1]`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
}

fn default_korn_samples() -> usize {
    1000
}

impl Default for KornSettings {
    fn default() -> Self {
        Self {
            samples: default_korn_samples(),
            seeds: None,
        }
    }
}

/// Pass thresholds. Lists are per resolution; a single entry applies to
/// every resolution. Absolute envelopes are multiplied by `--tol-scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Smallest acceptable observed convergence order.
    #[serde(default = "default_order")]
    pub min_order: f64,
    /// Smallest acceptable error reduction between consecutive resolutions.
    #[serde(default = "default_factor")]
    pub min_refinement_factor: f64,
    /// Envelope on `max |energy residual|`.
    #[serde(default)]
    pub energy_residual: Option<Vec<f64>>,
    /// Envelope on `max |rei residual|`.
    #[serde(default)]
    pub rei_residual: Option<Vec<f64>>,
    /// Additive slack in `E ≤ envelope + tol`.
    #[serde(default)]
    pub gap: Option<Vec<f64>>,
    /// Allowed relative spread of the Korn constant across seeds.
    #[serde(default = "default_korn_spread")]
    pub korn_spread: f64,
}

fn default_order() -> f64 {
    0.9
}

fn default_factor() -> f64 {
    1.5
}

fn default_korn_spread() -> f64 {
    0.1
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            min_order: default_order(),
            min_refinement_factor: default_factor(),
            energy_residual: None,
            rei_residual: None,
            gap: None,
            korn_spread: default_korn_spread(),
        }
    }
}

impl Tolerances {
    /// Envelope at resolution number `k`, if one is configured.
    pub fn pick(list: &Option<Vec<f64>>, k: usize) -> Option<f64> {
        let l = list.as_ref()?;
        l.get(k).or_else(|| (l.len() == 1).then(|| &l[0])).copied()
    }

    fn scale(&mut self, s: f64) {
        for l in [&mut self.energy_residual, &mut self.rei_residual, &mut self.gap]
            .into_iter()
            .flatten()
        {
            l.iter_mut().for_each(|v| *v *= s);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Registry key, see [`EXPERIMENTS`](super::EXPERIMENTS).
    pub experiment: String,
    pub grid: GridSpec,
    pub fluid: FluidParams,
    pub pair: PairSpec,
    /// Cells per axis, strictly increasing.
    pub resolutions: Vec<usize>,
    pub t_final: f64,
    pub save_every: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Calibration constant in front of the Gronwall weight.
    #[serde(default = "default_k")]
    pub gronwall_k: f64,
    #[serde(default)]
    pub scheme: SchemeOptions,
    #[serde(default)]
    pub perturbation: Perturbation,
    #[serde(default)]
    pub korn: KornSettings,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_k() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("invalid experiment name `{}`", self.name)));
        }
        if !super::EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(Error::UnknownExperiment(self.experiment.clone()));
        }
        if self.resolutions.is_empty() {
            return Err(Error::Config("resolutions must not be empty".into()));
        }
        if self.resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "resolutions {:?} must be strictly increasing",
                self.resolutions
            )));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final = {} must be > 0", self.t_final)));
        }
        if !(self.save_every > 0.0 && self.save_every <= self.t_final) {
            return Err(Error::Config(format!(
                "save_every = {} must lie in (0, t_final]",
                self.save_every
            )));
        }
        if !(self.gronwall_k >= 0.0 && self.gronwall_k.is_finite()) {
            return Err(Error::Config(format!("gronwall_k = {} must be >= 0", self.gronwall_k)));
        }
        if !(self.perturbation.amplitude >= 0.0 && self.perturbation.amplitude.is_finite()) {
            return Err(Error::Config("perturbation amplitude must be >= 0".into()));
        }
        if self.korn.samples == 0 {
            return Err(Error::Config("korn.samples must be positive".into()));
        }
        self.fluid.viscosity.validate().map_err(config)?;
        self.fluid.law.validate().map_err(config)?;
        self.scheme.validate()?;
        for n in &self.resolutions {
            self.grid.build(*n).map_err(config)?;
        }
        self.pair
            .build(self.grid.dim, self.fluid.rho_bar(), &self.fluid.viscosity)
            .map(|_| ())
    }

    /// Applies command-line overrides; `tol_scale` multiplies every absolute
    /// envelope.
    pub fn with_overrides(
        mut self,
        out_dir: Option<PathBuf>,
        seed: Option<u64>,
        tol_scale: Option<f64>,
    ) -> Result<Self> {
        if let Some(d) = out_dir {
            self.out_dir = Some(d);
        }
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(s) = tol_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("tolerance scale {s} must be > 0")));
            }
            self.tolerances.scale(s);
        }
        Ok(self)
    }

    /// Hex SHA-256 of the canonical JSON form. Equal configs hash equal
    /// whatever their TOML layout; the output directory is left out.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out_dir = None;
        let json = serde_json::to_vec(&canon).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn korn_seeds(&self) -> Vec<u64> {
        self.korn
            .seeds
            .clone()
            .unwrap_or_else(|| vec![self.seed, self.seed.wrapping_add(1)])
    }
}

fn config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}
