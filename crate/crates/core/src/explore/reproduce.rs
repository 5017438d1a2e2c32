//! Locates the landscape optima at given drive/temperature settings and
//! compares them with a pair of reference optima; when they disagree, scans a
//! small grid of alternative settings and reports the closest cell.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::drive::{PropagatorMethod, DEFAULT_OMEGA_TAU};
use crate::error::Result;
use crate::probe::MeasurementBasis;

use super::optimum::{refine_with, Objective, Optimum, RefineOptions};
use super::sweep::{sweep, SweepGrid, SweepParams};

/// Reference `(α, φ)` of the `−W` maximum.
pub const REFERENCE_WORK: (f64, f64) = (1.10, 1.77);
/// Reference `(α, φ)` of the `η` maximum.
pub const REFERENCE_EFFICIENCY: (f64, f64) = (1.15, 2.04);
/// Allowed deviation in each angle.
pub const ANGLE_TOLERANCE: f64 = 0.05;

/// Scores closer than this are treated as tied.
pub const SCORE_TIE: f64 = 1e-9;

pub const DIAGNOSTIC_BETA_HW: [f64; 3] = [0.5, 1.0, 2.0];
pub const DIAGNOSTIC_OMEGA_TAU: [f64; 3] = [DEFAULT_OMEGA_TAU, 0.1, 1.0];

/// Largest per-angle deviation of `o` from `target`, minimised over the two
/// equivalent labels `(α, φ)` and `(π − α, φ + π)` of the same projector pair.
pub fn angle_deviation(o: &Optimum, target: (f64, f64)) -> f64 {
    let wrap = |d: f64| (d + PI).rem_euclid(TAU) - PI;
    let dev = |a: f64, p: f64| (a - target.0).abs().max(wrap(p - target.1).abs());
    dev(o.alpha, o.phi).min(dev(PI - o.alpha, o.phi + PI))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocatedOptima {
    pub omega_tau: f64,
    pub beta_hw: f64,
    /// Refined, reported in the `φ ∈ [0, π]` half.
    pub work_output: Optimum,
    pub efficiency: Option<Optimum>,
    pub work_deviation: f64,
    pub efficiency_deviation: Option<f64>,
    /// `−W` evaluated at the reference `−W` point.
    pub work_at_reference: f64,
    /// `η` at the reference `η` point, if that point is in the engine regime.
    pub efficiency_at_reference: Option<f64>,
}

impl LocatedOptima {
    pub fn matches(&self) -> bool {
        self.work_deviation <= ANGLE_TOLERANCE
            && self.efficiency_deviation.is_some_and(|d| d <= ANGLE_TOLERANCE)
    }

    /// Worst of the two deviations; infinite when there is no engine regime.
    pub fn score(&self) -> f64 {
        self.work_deviation.max(self.efficiency_deviation.unwrap_or(f64::INFINITY))
    }
}

/// Grid sweep, then golden-section refinement of each grid argmax within one grid pitch.
pub fn locate_optima(omega_tau: f64, beta_hw: f64, grid: &SweepGrid) -> Result<LocatedOptima> {
    let params = SweepParams::new(omega_tau, beta_hw, PropagatorMethod::Exact);
    let result = sweep(&params, grid)?;
    let opts = RefineOptions::for_grid(grid);
    let seed = |o: &Optimum| (o.alpha, o.phi);
    let work = refine_with(&params, Objective::WorkOutput, seed(&result.optima.work_output), &opts)?.in_lower_half();
    let efficiency = match &result.optima.efficiency {
        Some(o) => Some(refine_with(&params, Objective::Efficiency, seed(o), &opts)?.in_lower_half()),
        None => None,
    };
    let setup = params.setup()?;
    let at = |(a, p): (f64, f64)| setup.run(MeasurementBasis::new(a, p)?);
    Ok(LocatedOptima {
        omega_tau,
        beta_hw,
        work_at_reference: at(REFERENCE_WORK)?.work_output(),
        efficiency_at_reference: at(REFERENCE_EFFICIENCY)?.efficiency,
        work_output: work,
        efficiency,
        work_deviation: angle_deviation(&work, REFERENCE_WORK),
        efficiency_deviation: efficiency.map(|e| angle_deviation(&e, REFERENCE_EFFICIENCY)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub grid: SweepGrid,
    pub diagnostic_grid: SweepGrid,
    pub primary: LocatedOptima,
    /// Empty when the primary settings already match.
    pub diagnostic: Vec<LocatedOptima>,
}

impl ReproductionReport {
    pub fn reproduced(&self) -> bool {
        self.primary.matches()
    }

    /// Diagnostic cell with the smallest score. Scores within [`SCORE_TIE`]
    /// count as equal and go to the earlier cell.
    pub fn best_cell(&self) -> Option<&LocatedOptima> {
        self.diagnostic
            .iter()
            .fold(None, |best: Option<&LocatedOptima>, c| match best {
                Some(b) if b.score() <= c.score() + SCORE_TIE => Some(b),
                _ => Some(c),
            })
    }

    /// Largest angle difference between optima of cells that share ωτ but
    /// differ in βħω; `None` if two such cells disagree on having an engine regime.
    pub fn beta_spread(&self) -> Option<f64> {
        let diff = |a: &Optimum, b: &Optimum| (a.alpha - b.alpha).abs().max((a.phi - b.phi).abs());
        let mut spread = 0.0_f64;
        for c in &self.diagnostic {
            for d in self.diagnostic.iter().filter(|d| d.omega_tau == c.omega_tau) {
                spread = spread.max(diff(&c.work_output, &d.work_output));
                match (&c.efficiency, &d.efficiency) {
                    (Some(x), Some(y)) => spread = spread.max(diff(x, y)),
                    (None, None) => {}
                    _ => return None,
                }
            }
        }
        Some(spread)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let fmt_opt = |o: &Option<Optimum>| match o {
            Some(o) => format!("({:.4}, {:.4}) η = {:.6}", o.alpha, o.phi, o.value),
            None => "none (no engine regime)".to_string(),
        };
        let fmt_dev = |d: Option<f64>| d.map_or("n/a".to_string(), |d| format!("{d:.4}"));
        let _ = writeln!(s, "# Optimum reproduction report\n");
        let _ = writeln!(
            s,
            "Reference optima: −W at (α, φ) = ({:.2}, {:.2}), η at ({:.2}, {:.2}); tolerance ±{} rad per angle.",
            REFERENCE_WORK.0, REFERENCE_WORK.1, REFERENCE_EFFICIENCY.0, REFERENCE_EFFICIENCY.1, ANGLE_TOLERANCE
        );
        let _ = writeln!(
            s,
            "Optima are refined from the grid argmax and reported with φ ∈ [0, π]; \
             (α, φ) and (π − α, φ + π) label the same measurement.\n"
        );
        let p = &self.primary;
        let _ = writeln!(
            s,
            "## Default settings (ωτ = {}, βħω = {}, grid {}x{})\n",
            p.omega_tau, p.beta_hw, self.grid.alpha_steps, self.grid.phi_steps
        );
        let _ = writeln!(
            s,
            "- −W maximum: ({:.4}, {:.4}) −W = {:.6}, deviation {:.4}",
            p.work_output.alpha, p.work_output.phi, p.work_output.value, p.work_deviation
        );
        let _ = writeln!(s, "- η maximum: {}, deviation {}", fmt_opt(&p.efficiency), fmt_dev(p.efficiency_deviation));
        let _ = writeln!(
            s,
            "- at the reference points: −W({:.2}, {:.2}) = {:.6}, η({:.2}, {:.2}) = {}",
            REFERENCE_WORK.0,
            REFERENCE_WORK.1,
            p.work_at_reference,
            REFERENCE_EFFICIENCY.0,
            REFERENCE_EFFICIENCY.1,
            p.efficiency_at_reference
                .map_or("undefined (not in the engine regime)".to_string(), |e| format!("{e:.6}"))
        );
        let _ = writeln!(
            s,
            "- verdict: {}\n",
            if self.reproduced() { "REPRODUCED" } else { "NOT REPRODUCED" }
        );
        if self.diagnostic.is_empty() {
            return s;
        }
        let _ = writeln!(
            s,
            "## Diagnostic sweep (grid {}x{})\n",
            self.diagnostic_grid.alpha_steps, self.diagnostic_grid.phi_steps
        );
        let _ = writeln!(s, "| βħω | ωτ | −W max (α, φ) | dev | η max (α, φ) | dev | match |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|");
        for c in &self.diagnostic {
            let eta = c.efficiency.map_or("none".to_string(), |e| format!("({:.4}, {:.4})", e.alpha, e.phi));
            let _ = writeln!(
                s,
                "| {} | {} | ({:.4}, {:.4}) | {:.4} | {} | {} | {} |",
                c.beta_hw,
                c.omega_tau,
                c.work_output.alpha,
                c.work_output.phi,
                c.work_deviation,
                eta,
                fmt_dev(c.efficiency_deviation),
                if c.matches() { "yes" } else { "no" }
            );
        }
        if let Some(spread) = self.beta_spread() {
            let _ = writeln!(s, "\nLargest optimum shift across βħω at fixed ωτ: {spread:.2e} rad.");
        }
        if let Some(b) = self.best_cell() {
            let _ = writeln!(
                s,
                "\nBest-matching cell: βħω = {}, ωτ = {} (worst-angle deviation {:.4}; {}).",
                b.beta_hw,
                b.omega_tau,
                b.score(),
                if b.matches() { "within tolerance" } else { "outside tolerance" }
            );
        }
        s
    }
}

/// Runs the default-settings comparison and, if it fails, the diagnostic scan.
pub fn reproduce(grid: &SweepGrid, diagnostic_grid: &SweepGrid) -> Result<ReproductionReport> {
    let primary = locate_optima(DEFAULT_OMEGA_TAU, 1.0, grid)?;
    let mut diagnostic = Vec::new();
    if !primary.matches() {
        for beta in DIAGNOSTIC_BETA_HW {
            for wt in DIAGNOSTIC_OMEGA_TAU {
                diagnostic.push(locate_optima(wt, beta, diagnostic_grid)?);
            }
        }
    }
    Ok(ReproductionReport {
        grid: *grid,
        diagnostic_grid: *diagnostic_grid,
        primary,
        diagnostic,
    })
}
