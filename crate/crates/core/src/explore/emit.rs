//! CSV and JSON serialization of records, sweeps and slices.
//!
//! CSV files start with `#`-prefixed metadata lines, then the fixed header
//! [`CSV_HEADER`], then one row per grid point in canonical order. Floats are
//! written in shortest round-trip form, so re-parsing reproduces every bit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cycle::CycleRecord;
use crate::error::{Error, Result};

use super::slice::{SliceAxis, SliceResult};
use super::sweep::{SweepGrid, SweepResult, SweepRow};

pub const CSV_COLUMNS: [&str; 13] = [
    "alpha", "phi", "neg_W", "Q_M", "Q_T", "eta", "D2", "D3", "D4", "F3", "F4", "dS_M", "regime",
];
pub const CSV_HEADER: &str = "alpha,phi,neg_W,Q_M,Q_T,eta,D2,D3,D4,F3,F4,dS_M,regime";

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::invalid(format!("unknown output format {s:?} (expected csv or json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceInfo {
    pub free_axis: SliceAxis,
    pub fixed_value: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub tool_version: String,
    pub mode: String,
    pub omega_tau: f64,
    pub beta_hw: f64,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<SweepGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceInfo>,
    pub energy_units: String,
    pub entropy_units: String,
}

/// Anything the CLI can write out.
#[derive(Clone, Copy, Debug)]
pub enum Report<'a> {
    Record(&'a CycleRecord),
    Sweep(&'a SweepResult),
    Slice(&'a SliceResult),
}

impl Report<'_> {
    pub fn metadata(&self) -> Metadata {
        let (mode, omega_tau, beta_hw, method, grid, slice) = match self {
            Report::Record(r) => (
                "single",
                r.params.omega_tau,
                r.params.beta_hw,
                r.params.propagator_method,
                None,
                None,
            ),
            Report::Sweep(s) => ("sweep", s.params.omega_tau, s.params.beta_hw, s.params.method, Some(s.grid), None),
            Report::Slice(s) => (
                match s.free_axis {
                    SliceAxis::Alpha => "slice_alpha",
                    SliceAxis::Phi => "slice_phi",
                },
                s.params.omega_tau,
                s.params.beta_hw,
                s.params.method,
                None,
                Some(SliceInfo {
                    free_axis: s.free_axis,
                    fixed_value: s.fixed_value,
                    steps: s.steps,
                }),
            ),
        };
        Metadata {
            tool: TOOL_NAME.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            mode: mode.to_string(),
            omega_tau,
            beta_hw,
            method: method.to_string(),
            grid,
            slice,
            energy_units: "hbar_omega".to_string(),
            entropy_units: "nats".to_string(),
        }
    }

    pub fn rows(&self) -> Vec<SweepRow> {
        match self {
            Report::Record(r) => {
                let b = r.params.basis;
                vec![SweepRow::from_record(b.alpha(), b.phi(), r)]
            }
            Report::Sweep(s) => s.rows.clone(),
            Report::Slice(s) => s.rows.clone(),
        }
    }
}

fn num(x: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(x).to_string()
}

fn comment_lines(report: &Report<'_>) -> Vec<String> {
    let m = report.metadata();
    let mut lines = vec![
        format!("tool={} {}", m.tool, m.tool_version),
        format!("mode={}", m.mode),
        format!("omega_tau={}", num(m.omega_tau)),
        format!("beta_hw={}", num(m.beta_hw)),
        format!("method={}", m.method),
    ];
    if let Some(g) = m.grid {
        lines.push(format!("grid={}x{}", g.alpha_steps, g.phi_steps));
    }
    if let Some(s) = &m.slice {
        let axis = match s.free_axis {
            SliceAxis::Alpha => "alpha",
            SliceAxis::Phi => "phi",
        };
        lines.push(format!("free_axis={axis} fixed_value={} steps={}", num(s.fixed_value), s.steps));
    }
    lines.push(format!("energy_units={} entropy_units={}", m.energy_units, m.entropy_units));
    let optima = match report {
        Report::Sweep(s) => Some(&s.optima),
        Report::Slice(s) => Some(&s.maxima),
        Report::Record(_) => None,
    };
    if let Some(o) = optima {
        let w = &o.work_output;
        lines.push(format!("max_neg_W alpha={} phi={} value={}", num(w.alpha), num(w.phi), num(w.value)));
        match &o.efficiency {
            Some(e) => lines.push(format!("max_eta alpha={} phi={} value={}", num(e.alpha), num(e.phi), num(e.value))),
            None => lines.push("max_eta none (no engine-regime point)".to_string()),
        }
    }
    if let Report::Sweep(s) = report {
        if let Some(d) = &s.symmetry_residual {
            lines.push(format!("symmetry_defect neg_W={} eta={}", num(d.neg_w), num(d.eta)));
        }
    }
    lines
}

pub fn write_csv<W: Write>(report: &Report<'_>, mut out: W) -> io::Result<()> {
    for line in comment_lines(report) {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in report.rows() {
        w.write_record([
            num(row.alpha),
            num(row.phi),
            num(row.neg_w),
            num(row.q_m),
            num(row.q_t),
            row.eta.map(num).unwrap_or_default(),
            num(row.d2),
            num(row.d3),
            num(row.d4),
            num(row.f3),
            num(row.f4),
            num(row.ds_m),
            row.regime.as_str().to_string(),
        ])?;
    }
    w.flush()
}

#[derive(Serialize)]
struct JsonDocument<'a, T: Serialize> {
    metadata: Metadata,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_json<W: Write>(report: &Report<'_>, mut out: W) -> io::Result<()> {
    let metadata = report.metadata();
    let res = match report {
        Report::Record(r) => serde_json::to_writer_pretty(&mut out, &JsonDocument { metadata, body: *r }),
        Report::Sweep(s) => serde_json::to_writer_pretty(&mut out, &JsonDocument { metadata, body: *s }),
        Report::Slice(s) => serde_json::to_writer_pretty(&mut out, &JsonDocument { metadata, body: *s }),
    };
    res.map_err(io::Error::other)?;
    writeln!(out)?;
    out.flush()
}

pub fn write_report<W: Write>(report: &Report<'_>, format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(report, out),
        Format::Json => write_json(report, out),
    }
}

/// Writes to `destination`, or to stdout when `None`.
pub fn emit(report: &Report<'_>, format: Format, destination: Option<&Path>) -> Result<()> {
    match destination {
        Some(path) => {
            let io_err = |source| Error::Io {
                path: path.to_path_buf(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            write_report(report, format, BufWriter::new(file)).map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            write_report(report, format, stdout.lock()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}
