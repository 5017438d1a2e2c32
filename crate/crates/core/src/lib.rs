//! Single-spin quantum engine fueled by projective measurement.
//!
//! The cycle alternates two finite-time unitary strokes with a non-selective
//! measurement and a full thermalization. Work, quantum heat and efficiency
//! are priced both by direct traces and through thermal divergences
//! `D(ρ‖σ_eq)` against the Gibbs state of the instantaneous Hamiltonian.
//!
//! Units: ħ = ω = 1. Energies are in ħω, entropies in nats.

pub mod cycle;
pub mod drive;
pub mod error;
pub mod explore;
pub mod probe;
pub mod qmat;
pub mod thermo;

pub use cycle::{run_cycle, CycleParams, CycleRecord, CycleSetup, Regime};
pub use drive::{DriveProtocol, PropagatorMethod, Stroke, StrokeUnitary};
pub use error::{Error, Result};
pub use probe::MeasurementBasis;
pub use qmat::QubitMatrix;
pub use thermo::{StateFunctions, ThermalContext};
