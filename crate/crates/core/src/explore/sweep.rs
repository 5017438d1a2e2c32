use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::{CycleRecord, CycleSetup, Regime};
use crate::drive::PropagatorMethod;
use crate::error::{Error, Result};
use crate::probe::MeasurementBasis;

use super::optimum::{find_optimum, Objective, Optimum};
use super::symmetry::{symmetry_check, SymmetryDefects};

/// Cycle parameters shared by every point of a sweep (everything but the basis).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub omega_tau: f64,
    pub beta_hw: f64,
    pub method: PropagatorMethod,
}

impl SweepParams {
    pub fn new(omega_tau: f64, beta_hw: f64, method: PropagatorMethod) -> Self {
        Self {
            omega_tau,
            beta_hw,
            method,
        }
    }

    pub fn setup(&self) -> Result<CycleSetup> {
        CycleSetup::new(self.omega_tau, self.beta_hw, self.method)
    }
}

/// `alpha_steps` points over `[0, π]` including both ends, `phi_steps` points
/// over `[0, 2π)` excluding 2π.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SweepGrid {
    pub alpha_steps: usize,
    pub phi_steps: usize,
}

impl SweepGrid {
    pub const DEFAULT: SweepGrid = SweepGrid {
        alpha_steps: 181,
        phi_steps: 360,
    };

    pub fn new(alpha_steps: usize, phi_steps: usize) -> Result<Self> {
        if alpha_steps < 2 || phi_steps < 2 {
            return Err(Error::invalid(format!(
                "grid needs at least 2 steps per axis, got {alpha_steps}x{phi_steps}"
            )));
        }
        Ok(Self {
            alpha_steps,
            phi_steps,
        })
    }

    pub fn alpha(&self, j: usize) -> f64 {
        if j + 1 == self.alpha_steps {
            PI
        } else {
            j as f64 * PI / (self.alpha_steps - 1) as f64
        }
    }

    pub fn phi(&self, k: usize) -> f64 {
        k as f64 * TAU / self.phi_steps as f64
    }

    pub fn len(&self) -> usize {
        self.alpha_steps * self.phi_steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(j, k)` of a row-major row index.
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index / self.phi_steps, index % self.phi_steps)
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.phi_steps + k
    }

    pub fn alpha_pitch(&self) -> f64 {
        PI / (self.alpha_steps - 1) as f64
    }

    pub fn phi_pitch(&self) -> f64 {
        TAU / self.phi_steps as f64
    }
}

impl std::str::FromStr for SweepGrid {
    type Err = Error;

    /// Parses `AxP`, e.g. `181x360`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("grid must look like 181x360, got {s:?}"));
        let (a, p) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let p = p.trim().parse().map_err(|_| bad())?;
        SweepGrid::new(a, p)
    }
}

/// One emitted row: the landscape quantities at a single basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub phi: f64,
    #[serde(rename = "neg_W")]
    pub neg_w: f64,
    #[serde(rename = "Q_M")]
    pub q_m: f64,
    #[serde(rename = "Q_T")]
    pub q_t: f64,
    pub eta: Option<f64>,
    #[serde(rename = "D2")]
    pub d2: f64,
    #[serde(rename = "D3")]
    pub d3: f64,
    #[serde(rename = "D4")]
    pub d4: f64,
    #[serde(rename = "F3")]
    pub f3: f64,
    #[serde(rename = "F4")]
    pub f4: f64,
    #[serde(rename = "dS_M")]
    pub ds_m: f64,
    pub regime: Regime,
}

impl SweepRow {
    /// Uses the nominal grid angles rather than the normalized basis angles so
    /// that emitted coordinates are exactly the grid values.
    pub fn from_record(alpha: f64, phi: f64, rec: &CycleRecord) -> Self {
        Self {
            alpha,
            phi,
            neg_w: rec.work_output(),
            q_m: rec.q_measure,
            q_t: rec.q_thermal,
            eta: rec.efficiency,
            d2: rec.sf[1].divergence,
            d3: rec.sf[2].divergence,
            d4: rec.sf[3].divergence,
            f3: rec.sf[2].f_neq,
            f4: rec.sf[3].f_neq,
            ds_m: rec.ds_measure,
            regime: rec.regime,
        }
    }

    pub fn objective(&self, objective: Objective) -> Option<f64> {
        match objective {
            Objective::WorkOutput => Some(self.neg_w),
            Objective::Efficiency => self.eta,
        }
    }
}

/// Worst per-record residuals seen during a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepDiagnostics {
    pub max_invariant_residual: f64,
    pub max_route_discrepancy: f64,
    pub max_efficiency_route_discrepancy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optima {
    pub work_output: Optimum,
    pub efficiency: Option<Optimum>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub params: SweepParams,
    pub grid: SweepGrid,
    pub rows: Vec<SweepRow>,
    pub optima: Optima,
    /// `None` when the grid is not closed under `φ → φ + π`.
    pub symmetry_residual: Option<SymmetryDefects>,
    pub diagnostics: SweepDiagnostics,
}

pub(crate) struct Evaluated {
    pub row: SweepRow,
    pub invariant: f64,
    pub routes: f64,
    pub eta_routes: f64,
}

pub(crate) fn evaluate(setup: &CycleSetup, alpha: f64, phi: f64) -> Result<Evaluated> {
    let wrap = |e: Error| Error::GridPoint {
        alpha,
        phi,
        source: Box::new(e),
    };
    let basis = MeasurementBasis::new(alpha, phi).map_err(wrap)?;
    let rec = setup.run(basis).map_err(wrap)?;
    let routes = rec.route_discrepancies();
    Ok(Evaluated {
        row: SweepRow::from_record(alpha, phi, &rec),
        invariant: rec.invariant_residuals().max(),
        routes: routes.max_energy(),
        eta_routes: routes.efficiency.unwrap_or(0.0),
    })
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub(crate) fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::invalid("worker count must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Evaluates the cycle at every grid point. Rows come back in row-major
/// `(α, φ)` order whatever the scheduling.
pub fn sweep(params: &SweepParams, grid: &SweepGrid) -> Result<SweepResult> {
    sweep_with_workers(params, grid, None)
}

pub fn sweep_with_workers(params: &SweepParams, grid: &SweepGrid, workers: Option<usize>) -> Result<SweepResult> {
    let grid = SweepGrid::new(grid.alpha_steps, grid.phi_steps)?;
    let setup = params.setup()?;
    let evaluated = with_workers(workers, || {
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (j, k) = grid.coords(i);
                evaluate(&setup, grid.alpha(j), grid.phi(k))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut diagnostics = SweepDiagnostics::default();
    let mut rows = Vec::with_capacity(evaluated.len());
    for e in evaluated {
        diagnostics.max_invariant_residual = diagnostics.max_invariant_residual.max(e.invariant);
        diagnostics.max_route_discrepancy = diagnostics.max_route_discrepancy.max(e.routes);
        diagnostics.max_efficiency_route_discrepancy = diagnostics.max_efficiency_route_discrepancy.max(e.eta_routes);
        rows.push(e.row);
    }

    let mut result = SweepResult {
        params: *params,
        grid,
        rows,
        optima: Optima {
            work_output: Optimum::default(),
            efficiency: None,
        },
        symmetry_residual: None,
        diagnostics,
    };
    result.optima.work_output = find_optimum(&result, Objective::WorkOutput)?;
    result.optima.efficiency = match find_optimum(&result, Objective::Efficiency) {
        Ok(o) => Some(o),
        Err(Error::NoEngineRegime) => None,
        Err(e) => return Err(e),
    };
    result.symmetry_residual = match symmetry_check(&result) {
        Ok(d) => Some(d),
        Err(Error::GridNotClosed(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(result)
}
