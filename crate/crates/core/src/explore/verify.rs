//! Seeded randomized invariant suite behind `spin-engine verify`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cycle::{run_cycle, CycleParams, CycleRecord};
use crate::drive::{propagator, DriveProtocol, PropagatorMethod, Stroke, DEFAULT_OMEGA_TAU, DEFAULT_SLICES};
use crate::error::Result;
use crate::qmat::QubitMatrix;
use crate::thermo::{divergence, gibbs_state, noneq_free_energy, partition_and_free_energy, thermal_divergence, ThermalContext};

use super::sweep::{sweep, SweepGrid, SweepParams};

pub const OMEGA_TAU_RANGE: (f64, f64) = (1e-3, 10.0);
pub const BETA_HW_RANGE: (f64, f64) = (0.1, 10.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Random cycle draws.
    pub cycle_samples: usize,
    /// Random `(ρ, H, β)` draws for the divergence identities.
    pub state_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            cycle_samples: 10_000,
            state_samples: 1_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, observed: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            observed,
            threshold,
            passed: observed < threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub options: VerifyOptions,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn log_uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo.ln()..=hi.ln()).exp()
}

/// ωτ and βħω log-uniform over their ranges, α uniform on `[0, π]`, φ on `[0, 2π)`.
pub fn draw_cycle_params(rng: &mut impl Rng) -> Result<CycleParams> {
    let wt = log_uniform(rng, OMEGA_TAU_RANGE);
    let beta = log_uniform(rng, BETA_HW_RANGE);
    CycleParams::exact(wt, beta, rng.gen_range(0.0..=PI), rng.gen_range(0.0..TAU))
}

/// Uniform point on the unit sphere.
pub fn draw_direction(rng: &mut impl Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let t: f64 = rng.gen_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    [s * t.cos(), s * t.sin(), z]
}

/// Density matrix with Bloch radius uniform in `[0, 1)`.
pub fn draw_density(rng: &mut impl Rng) -> QubitMatrix {
    let r: f64 = rng.gen_range(0.0..1.0);
    let n = draw_direction(rng);
    QubitMatrix::from_pauli(0.5, n.map(|c| 0.5 * r * c))
}

/// Hermitian `a₀I + a·σ` with `a₀ ∈ [−1, 1]` and `|a| ∈ [0.05, 0.5]`, i.e. a gap
/// of at most one unit, the scale of every Hamiltonian in the cycle.
pub fn draw_hamiltonian(rng: &mut impl Rng) -> QubitMatrix {
    let a0 = rng.gen_range(-1.0..=1.0);
    let r = rng.gen_range(0.05..=0.5);
    let n = draw_direction(rng);
    QubitMatrix::from_pauli(a0, n.map(|c| r * c))
}

#[derive(Default)]
struct CycleStats {
    first_law: f64,
    routes: f64,
    eta_routes: f64,
    isentropy: f64,
    negativity: f64,
    initial_divergence: f64,
}

impl CycleStats {
    fn absorb(&mut self, rec: &CycleRecord) {
        let r = rec.invariant_residuals();
        let d = rec.route_discrepancies();
        self.first_law = self.first_law.max(r.first_law);
        self.routes = self.routes.max(d.max_energy());
        self.eta_routes = self.eta_routes.max(d.efficiency.unwrap_or(0.0));
        self.isentropy = self.isentropy.max(r.isentropy_i).max(r.isentropy_iii);
        self.negativity = self.negativity.max(r.negativity);
        self.initial_divergence = self.initial_divergence.max(r.initial_divergence);
    }
}

pub fn run_suite(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut checks = Vec::new();

    let mut stats = CycleStats::default();
    for _ in 0..options.cycle_samples {
        stats.absorb(&run_cycle(&draw_cycle_params(&mut rng)?)?);
    }
    checks.push(Check::below("first_law", stats.first_law, 1e-12));
    checks.push(Check::below("energy_routes", stats.routes, 1e-11));
    checks.push(Check::below("efficiency_routes", stats.eta_routes, 1e-9));
    checks.push(Check::below("isentropy", stats.isentropy, 1e-12));
    checks.push(Check::below("negative_entropy_or_divergence", stats.negativity, 1e-12));
    checks.push(Check::below("initial_divergence", stats.initial_divergence, 1e-12));

    let (mut route, mut free, mut klein) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..options.state_samples {
        let rho = draw_density(&mut rng);
        let h = draw_hamiltonian(&mut rng);
        let ctx = ThermalContext::new(log_uniform(&mut rng, BETA_HW_RANGE))?;
        let d_spec = divergence(&rho, &gibbs_state(&h, &ctx)?)?;
        let d_thermo = thermal_divergence(&rho, &h, &ctx)?;
        let (_, f_eq) = partition_and_free_energy(&h, &ctx)?;
        let d_free = ctx.beta() * (noneq_free_energy(&rho, &h, &ctx)? - f_eq);
        route = route.max((d_spec - d_thermo).abs());
        free = free.max((d_thermo - d_free).abs());
        klein = klein.max(-d_spec).max(-d_thermo);
    }
    checks.push(Check::below("divergence_routes", route, 1e-11));
    checks.push(Check::below("free_energy_identity", free, 1e-12));
    checks.push(Check::below("klein_negativity", klein.max(0.0), 1e-12));

    let mut null = 0.0_f64;
    for _ in 0..100 {
        let wt = log_uniform(&mut rng, OMEGA_TAU_RANGE);
        let beta = log_uniform(&mut rng, BETA_HW_RANGE);
        null = null.max(run_cycle(&CycleParams::exact(wt, beta, FRAC_PI_2, 0.0)?)?.q_measure.abs());
    }
    checks.push(Check::below("commuting_measurement_null", null, 1e-12));

    let landscape = sweep(
        &SweepParams::new(DEFAULT_OMEGA_TAU, 1.0, PropagatorMethod::Exact),
        &SweepGrid::new(19, 36)?,
    )?;
    let sym = landscape.symmetry_residual.map_or(f64::INFINITY, |d| d.max());
    checks.push(Check::below("landscape_symmetry", sym, 1e-10));

    let mut prop = 0.0_f64;
    for wt in [1e-2, 1.0, 10.0] {
        for branch in [Stroke::StrokeI, Stroke::StrokeII] {
            let p = DriveProtocol::new(wt, branch)?;
            let exact = propagator(&p, PropagatorMethod::Exact)?.matrix;
            let sliced = propagator(&p, PropagatorMethod::Sliced(DEFAULT_SLICES))?.matrix;
            prop = prop.max(exact.max_diff(&sliced));
        }
    }
    checks.push(Check::below("propagator_exact_vs_sliced", prop, 1e-9));

    Ok(SuiteReport {
        options: *options,
        checks,
    })
}
