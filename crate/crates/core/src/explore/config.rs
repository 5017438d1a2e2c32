//! Run configuration: an optional JSON file merged with command-line overrides.
//!
//! ```json
//! {
//!   "mode": "sweep",
//!   "omega_tau": 0.006381,
//!   "beta_hw": 1.0,
//!   "grid": { "alpha_steps": 181, "phi_steps": 360 },
//!   "method": { "kind": "exact" },
//!   "output": { "path": "landscape.csv", "format": "csv" }
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::drive::{PropagatorMethod, DEFAULT_OMEGA_TAU, DEFAULT_SLICES};
use crate::error::{Error, Result};
use crate::probe::MeasurementBasis;
use crate::thermo::ThermalContext;

use super::emit::Format;
use super::slice::SliceAxis;
use super::sweep::{SweepGrid, SweepParams};

pub const DEFAULT_BETA_HW: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Single,
    Sweep,
    SliceAlpha,
    SlicePhi,
    Verify,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub alpha_steps: Option<usize>,
    pub phi_steps: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub kind: String,
    pub slices: Option<usize>,
}

impl MethodSpec {
    fn resolve(&self) -> Result<PropagatorMethod> {
        match (self.kind.as_str(), self.slices) {
            ("exact", None) => Ok(PropagatorMethod::Exact),
            ("exact", Some(_)) => Err(Error::Config("method.slices only applies to kind \"sliced\"".into())),
            ("sliced", None) => Ok(PropagatorMethod::Sliced(DEFAULT_SLICES)),
            ("sliced", Some(0)) => Err(Error::Config("method.slices must be at least 1".into())),
            ("sliced", Some(n)) => Ok(PropagatorMethod::Sliced(n)),
            (k, _) => Err(Error::Config(format!("unknown method.kind {k:?} (expected exact or sliced)"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// The JSON config file as written; every key optional, unknown keys rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mode: Option<Mode>,
    pub omega_tau: Option<f64>,
    pub beta_hw: Option<f64>,
    pub alpha: Option<f64>,
    pub phi: Option<f64>,
    pub grid: Option<GridSpec>,
    pub method: Option<MethodSpec>,
    pub output: Option<OutputSpec>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// Values given on the command line; they win over the config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub omega_tau: Option<f64>,
    pub beta_hw: Option<f64>,
    pub alpha: Option<f64>,
    pub phi: Option<f64>,
    pub grid: Option<SweepGrid>,
    pub method: Option<PropagatorMethod>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A fully resolved and validated run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub omega_tau: f64,
    pub beta_hw: f64,
    pub alpha: Option<f64>,
    pub phi: Option<f64>,
    pub grid: SweepGrid,
    pub method: PropagatorMethod,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(file: &ConfigFile, cli: &Overrides) -> Result<Self> {
        let mode = cli
            .mode
            .or(file.mode)
            .ok_or_else(|| Error::Config("no mode given".into()))?;
        let omega_tau = cli.omega_tau.or(file.omega_tau).unwrap_or(DEFAULT_OMEGA_TAU);
        let beta_hw = cli.beta_hw.or(file.beta_hw).unwrap_or(DEFAULT_BETA_HW);
        let alpha = cli.alpha.or(file.alpha);
        let phi = cli.phi.or(file.phi);

        let grid = match cli.grid {
            Some(g) => g,
            None => {
                let spec = file.grid.clone().unwrap_or_default();
                SweepGrid::new(
                    spec.alpha_steps.unwrap_or(SweepGrid::DEFAULT.alpha_steps),
                    spec.phi_steps.unwrap_or(SweepGrid::DEFAULT.phi_steps),
                )
                .map_err(config_err)?
            }
        };
        let method = match (cli.method, &file.method) {
            (Some(m), _) => m,
            (None, Some(spec)) => spec.resolve()?,
            (None, None) => PropagatorMethod::Exact,
        };
        let output = file.output.clone().unwrap_or_default();
        let out = cli.out.clone().or(output.path);
        let format = cli.format.or(output.format).unwrap_or(match mode {
            Mode::Single => Format::Json,
            _ => Format::Csv,
        });

        DriveProtocolCheck::omega_tau(omega_tau)?;
        ThermalContext::new(beta_hw).map_err(config_err)?;
        if let PropagatorMethod::Sliced(0) = method {
            return Err(Error::Config("slice count must be at least 1".into()));
        }
        let require = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("mode {mode:?} requires {name}")))
        };
        match mode {
            Mode::Single => {
                MeasurementBasis::new(require(alpha, "alpha")?, require(phi, "phi")?).map_err(config_err)?;
            }
            Mode::SliceAlpha => {
                MeasurementBasis::new(0.0, require(phi, "phi (the fixed longitude)")?).map_err(config_err)?;
            }
            Mode::SlicePhi => {
                MeasurementBasis::new(require(alpha, "alpha (the fixed colatitude)")?, 0.0).map_err(config_err)?;
            }
            Mode::Sweep | Mode::Verify => {}
        }

        Ok(Self {
            mode,
            omega_tau,
            beta_hw,
            alpha,
            phi,
            grid,
            method,
            out,
            format,
        })
    }

    pub fn sweep_params(&self) -> SweepParams {
        SweepParams::new(self.omega_tau, self.beta_hw, self.method)
    }

    /// Free axis, fixed angle and step count for the slice modes.
    pub fn slice_spec(&self) -> Option<(SliceAxis, f64, usize)> {
        match self.mode {
            Mode::SliceAlpha => Some((SliceAxis::Alpha, self.phi?, self.grid.alpha_steps)),
            Mode::SlicePhi => Some((SliceAxis::Phi, self.alpha?, self.grid.phi_steps)),
            _ => None,
        }
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::InvalidInput(msg) => Error::Config(msg),
        other => other,
    }
}

struct DriveProtocolCheck;

impl DriveProtocolCheck {
    fn omega_tau(v: f64) -> Result<()> {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!("omega_tau must be positive and finite, got {v}")))
        }
    }
}
