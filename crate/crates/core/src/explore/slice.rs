//! One-dimensional cuts through the landscape: vary one angle with the other held fixed.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::optimum::{Objective, Optimum};
use super::sweep::{evaluate, with_workers, Optima, SweepParams, SweepRow};

/// The angle that varies along the slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceAxis {
    /// α over `[0, π]` (endpoints included) at fixed φ.
    Alpha,
    /// φ over `[0, 2π)` at fixed α.
    Phi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceResult {
    pub params: SweepParams,
    pub free_axis: SliceAxis,
    pub fixed_value: f64,
    pub steps: usize,
    pub rows: Vec<SweepRow>,
    /// Slice-local maxima.
    pub maxima: Optima,
}

impl SliceAxis {
    fn point(&self, i: usize, steps: usize) -> f64 {
        match self {
            SliceAxis::Alpha if i + 1 == steps => PI,
            SliceAxis::Alpha => i as f64 * PI / (steps - 1) as f64,
            SliceAxis::Phi => i as f64 * TAU / steps as f64,
        }
    }
}

pub fn slice(
    params: &SweepParams,
    free_axis: SliceAxis,
    fixed_value: f64,
    steps: usize,
    workers: Option<usize>,
) -> Result<SliceResult> {
    if steps < 2 {
        return Err(Error::invalid(format!("slice needs at least 2 steps, got {steps}")));
    }
    let setup = params.setup()?;
    let rows = with_workers(workers, || {
        (0..steps)
            .into_par_iter()
            .map(|i| {
                let free = free_axis.point(i, steps);
                let (alpha, phi) = match free_axis {
                    SliceAxis::Alpha => (free, fixed_value),
                    SliceAxis::Phi => (fixed_value, free),
                };
                evaluate(&setup, alpha, phi).map(|e| e.row)
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let argmax = |objective: Objective| -> Option<Optimum> {
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in rows.iter().enumerate() {
            if let Some(v) = row.objective(objective) {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, value)| Optimum {
            alpha: rows[i].alpha,
            phi: rows[i].phi,
            value,
            row_index: Some(i),
        })
    };
    let maxima = Optima {
        work_output: argmax(Objective::WorkOutput).expect("slice has at least two rows"),
        efficiency: argmax(Objective::Efficiency),
    };

    Ok(SliceResult {
        params: *params,
        free_axis,
        fixed_value,
        steps,
        rows,
        maxima,
    })
}
