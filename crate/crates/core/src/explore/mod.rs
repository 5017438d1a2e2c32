//! Landscape exploration over the measurement angles: grid sweeps, optimum
//! search and refinement, the symmetry check, slices, output and run configuration.

pub mod config;
pub mod emit;
pub mod optimum;
pub mod reproduce;
pub mod slice;
pub mod sweep;
pub mod symmetry;
pub mod verify;

pub use config::{ConfigFile, Mode, Overrides, RunConfig};
pub use emit::{emit, write_report, Format, Report, CSV_HEADER};
pub use optimum::{find_optimum, refine, refine_with, Objective, Optimum, RefineOptions};
pub use reproduce::{reproduce, ReproductionReport};
pub use slice::{slice, SliceAxis, SliceResult};
pub use sweep::{sweep, sweep_with_workers, Optima, SweepGrid, SweepParams, SweepResult, SweepRow};
pub use symmetry::{symmetry_check, SymmetryDefects};
pub use verify::{run_suite, SuiteReport, VerifyOptions};
