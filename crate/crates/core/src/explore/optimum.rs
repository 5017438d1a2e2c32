use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::cycle::CycleSetup;
use crate::error::{Error, Result};
use crate::probe::MeasurementBasis;

use super::sweep::{SweepGrid, SweepParams, SweepResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `−W` over every basis.
    WorkOutput,
    /// `η` over engine-regime bases only.
    Efficiency,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub alpha: f64,
    pub phi: f64,
    pub value: f64,
    /// Row of the sweep the optimum came from; absent after refinement.
    pub row_index: Option<usize>,
}

impl Optimum {
    /// Same landscape point mapped into `φ ∈ [0, π]` through
    /// `(α, φ) ~ (π − α, φ − π)`, which names the same projector pair.
    pub fn in_lower_half(&self) -> Optimum {
        if self.phi > PI {
            Optimum {
                alpha: PI - self.alpha,
                phi: self.phi - PI,
                ..*self
            }
        } else {
            *self
        }
    }
}

/// Grid argmax; ties go to the smallest row index.
pub fn find_optimum(result: &SweepResult, objective: Objective) -> Result<Optimum> {
    let mut best: Option<(usize, f64)> = None;
    for (i, row) in result.rows.iter().enumerate() {
        let Some(v) = row.objective(objective) else { continue };
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (i, value) = best.ok_or(Error::NoEngineRegime)?;
    Ok(Optimum {
        alpha: result.rows[i].alpha,
        phi: result.rows[i].phi,
        value,
        row_index: Some(i),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    /// Search interval is `seed ± half_width` in each angle.
    pub alpha_half_width: f64,
    pub phi_half_width: f64,
    /// Golden-section intervals stop shrinking below this width.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            alpha_half_width: PI / 180.0,
            phi_half_width: PI / 180.0,
            tolerance: 1e-6,
            max_sweeps: 200,
        }
    }
}

impl RefineOptions {
    /// One grid pitch either side of the seed.
    pub fn for_grid(grid: &SweepGrid) -> Self {
        Self {
            alpha_half_width: grid.alpha_pitch(),
            phi_half_width: grid.phi_pitch(),
            ..Self::default()
        }
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Returns the best abscissa evaluated and its value.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn objective_at(setup: &CycleSetup, objective: Objective, alpha: f64, phi: f64) -> Result<f64> {
    let rec = setup.run(MeasurementBasis::new(alpha, phi)?)?;
    Ok(match objective {
        Objective::WorkOutput => rec.work_output(),
        Objective::Efficiency => rec.efficiency.unwrap_or(f64::NEG_INFINITY),
    })
}

pub fn refine(params: &SweepParams, objective: Objective, seed: (f64, f64)) -> Result<Optimum> {
    refine_with(params, objective, seed, &RefineOptions::default())
}

/// Alternating golden-section ascent, first in α then in φ, inside the box
/// `seed ± half_width`. Stops once a full α/φ pass moves neither angle by more
/// than the tolerance. Each coordinate step keeps the incumbent if the line
/// search does not beat it, so the returned value is never below the seed's.
pub fn refine_with(
    params: &SweepParams,
    objective: Objective,
    seed: (f64, f64),
    options: &RefineOptions,
) -> Result<Optimum> {
    let setup = params.setup()?;
    let (alpha0, phi0) = seed;
    let seed_basis = MeasurementBasis::new(alpha0, phi0)?;
    let seed_value = objective_at(&setup, objective, seed_basis.alpha(), seed_basis.phi())?;
    if !seed_value.is_finite() {
        return Err(Error::invalid(format!(
            "seed ({alpha0}, {phi0}) is not in the engine regime; efficiency is undefined there"
        )));
    }

    let a_lo = (alpha0 - options.alpha_half_width).max(0.0);
    let a_hi = (alpha0 + options.alpha_half_width).min(PI);
    let p_lo = phi0 - options.phi_half_width;
    let p_hi = phi0 + options.phi_half_width;
    let eval = |a: f64, p: f64| objective_at(&setup, objective, a, p).unwrap_or(f64::NEG_INFINITY);

    let (mut alpha, mut phi, mut value) = (alpha0, phi0, seed_value);
    for _ in 0..options.max_sweeps {
        let (a_new, v_a) = golden_section_max(|a| eval(a, phi), a_lo, a_hi, options.tolerance);
        let moved_alpha = if v_a > value {
            let d = (a_new - alpha).abs();
            alpha = a_new;
            value = v_a;
            d
        } else {
            0.0
        };
        let (p_new, v_p) = golden_section_max(|p| eval(alpha, p), p_lo, p_hi, options.tolerance);
        let moved_phi = if v_p > value {
            let d = (p_new - phi).abs();
            phi = p_new;
            value = v_p;
            d
        } else {
            0.0
        };
        if moved_alpha < options.tolerance && moved_phi < options.tolerance {
            break;
        }
    }
    Ok(Optimum {
        alpha,
        phi: phi.rem_euclid(TAU),
        value,
        row_index: None,
    })
}
