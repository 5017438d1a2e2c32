use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spin_engine::cycle::{run_cycle, CycleParams};
use spin_engine::error::{Error, Result};
use spin_engine::explore::emit::{emit, Format, Report};
use spin_engine::explore::reproduce::reproduce;
use spin_engine::explore::{
    run_suite, slice, sweep_with_workers, ConfigFile, Mode, Overrides, RunConfig, SweepGrid, VerifyOptions,
};
use spin_engine::probe::MeasurementBasis;
use spin_engine::PropagatorMethod;

#[derive(Parser)]
#[command(name = "spin-engine", version, about = "Measurement-fueled single-spin engine: cycles, sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one cycle (JSON record by default).
    Run(Common),
    /// Evaluate the full (α, φ) grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Vary one angle with the other fixed.
    Slice {
        #[command(flatten)]
        common: Common,
        /// Angle that varies; the other must be given.
        #[arg(long, value_enum)]
        free: FreeAxis,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the randomized invariant suite; exit code 1 on any failure.
    Verify {
        #[arg(long, default_value_t = VerifyOptions::default().cycle_samples)]
        samples: usize,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Locate the optima at the default settings and compare with the reference optima.
    Reproduce {
        #[arg(long, default_value = "181x360")]
        grid: SweepGrid,
        #[arg(long, default_value = "181x360")]
        diagnostic_grid: SweepGrid,
        /// Markdown report destination (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FreeAxis {
    Alpha,
    Phi,
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    omega_tau: Option<f64>,
    #[arg(long)]
    beta_hw: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Grid as AxP, e.g. 181x360.
    #[arg(long)]
    grid: Option<SweepGrid>,
    /// exact | sliced | sliced:N
    #[arg(long)]
    method: Option<PropagatorMethod>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn resolve(&self, mode: Mode) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let cli = Overrides {
            mode: Some(mode),
            omega_tau: self.omega_tau,
            beta_hw: self.beta_hw,
            alpha: self.alpha,
            phi: self.phi,
            grid: self.grid,
            method: self.method,
            out: self.out.clone(),
            format: self.format,
        };
        RunConfig::resolve(&file, &cli)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::GridPoint { source, .. } => exit_code(source),
        _ => 2,
    }
}

fn write_text(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run(common) => {
            let cfg = common.resolve(Mode::Single)?;
            let basis = MeasurementBasis::new(cfg.alpha.unwrap_or_default(), cfg.phi.unwrap_or_default())?;
            let rec = run_cycle(&CycleParams::new(cfg.omega_tau, cfg.beta_hw, basis, cfg.method)?)?;
            emit(&Report::Record(&rec), cfg.format, cfg.out.as_deref())?;
        }
        Command::Sweep { common, workers } => {
            let cfg = common.resolve(Mode::Sweep)?;
            let result = sweep_with_workers(&cfg.sweep_params(), &cfg.grid, workers)?;
            emit(&Report::Sweep(&result), cfg.format, cfg.out.as_deref())?;
        }
        Command::Slice { common, free, workers } => {
            let mode = match free {
                FreeAxis::Alpha => Mode::SliceAlpha,
                FreeAxis::Phi => Mode::SlicePhi,
            };
            let cfg = common.resolve(mode)?;
            let (axis, fixed, steps) = cfg.slice_spec().expect("slice mode resolved");
            let result = slice(&cfg.sweep_params(), axis, fixed, steps, workers)?;
            emit(&Report::Slice(&result), cfg.format, cfg.out.as_deref())?;
        }
        Command::Verify { samples, seed, json } => {
            let report = run_suite(&VerifyOptions {
                cycle_samples: samples,
                seed,
                ..VerifyOptions::default()
            })?;
            let text = if json {
                serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))? + "\n"
            } else {
                let mut t = String::new();
                for c in &report.checks {
                    t += &format!(
                        "{:<4} {:<32} {:>12.3e} < {:.0e}\n",
                        if c.passed { "ok" } else { "FAIL" },
                        c.name,
                        c.observed,
                        c.threshold
                    );
                }
                t
            };
            write_text(&text, None)?;
            return Ok(report.passed());
        }
        Command::Reproduce {
            grid,
            diagnostic_grid,
            out,
        } => {
            let report = reproduce(&grid, &diagnostic_grid)?;
            write_text(&report.to_markdown(), out.as_ref())?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
