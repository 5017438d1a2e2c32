//! The landscape is invariant under `(α, φ) → (π − α, φ + π)`: that map sends
//! the measurement direction `n` to `−n`, which only swaps `|χ₁⟩` and `|χ₂⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sweep::SweepResult;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymmetryDefects {
    /// `max |(−W)(α, φ) − (−W)(π − α, φ + π)|` over the grid.
    pub neg_w: f64,
    /// Same for `η`, over pairs where both points are in the engine regime.
    pub eta: f64,
    /// Pairs where exactly one partner is in the engine regime.
    pub regime_mismatches: usize,
}

impl SymmetryDefects {
    pub fn max(&self) -> f64 {
        self.neg_w.max(self.eta)
    }
}

pub fn symmetry_check(result: &SweepResult) -> Result<SymmetryDefects> {
    let grid = &result.grid;
    if !grid.phi_steps.is_multiple_of(2) {
        return Err(Error::GridNotClosed(grid.phi_steps));
    }
    let half = grid.phi_steps / 2;
    let mut d = SymmetryDefects::default();
    for (i, row) in result.rows.iter().enumerate() {
        let (j, k) = grid.coords(i);
        let partner = &result.rows[grid.index(grid.alpha_steps - 1 - j, (k + half) % grid.phi_steps)];
        d.neg_w = d.neg_w.max((row.neg_w - partner.neg_w).abs());
        match (row.eta, partner.eta) {
            (Some(a), Some(b)) => d.eta = d.eta.max((a - b).abs()),
            (None, None) => {}
            _ => d.regime_mismatches += 1,
        }
    }
    Ok(d)
}
