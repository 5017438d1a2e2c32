//! The four-stroke measurement engine.
//!
//! ```text
//! ρ₁ = Gibbs(H₁)  ──U──▶  ρ₂  ──measure──▶  ρ₃  ──V──▶  ρ₄  ──bath──▶  ρ₁
//!     H₁ = ½σz           H₂ = ½σx          H₃ = H₂          H₄ = H₁
//! ```
//!
//! Sign conventions: work `W` is done on the spin, heats `Q_M` and `Q_T` flow
//! into it. The engine regime is `W < 0` with `Q_M > 0`.
//!
//! Every per-stroke quantity is stored from the direct trace formulas; the
//! divergence/free-energy forms are exposed through [`Routes`] so that each
//! record can be cross-checked against itself.

use serde::{Deserialize, Serialize};

use crate::drive::{corner_hamiltonians, propagator, DriveProtocol, PropagatorMethod, Stroke, StrokeUnitary};
use crate::error::{Error, Result};
use crate::probe::{dephase, MeasurementBasis};
use crate::qmat::QubitMatrix;
use crate::thermo::{
    divergence_to_gibbs, gibbs_state, internal_energy, partition_and_free_energy, von_neumann_entropy,
    StateFunctions, ThermalContext,
};

/// `Q_M` at or below this is treated as zero when deciding the regime.
pub const ZERO_HEAT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleParams {
    pub omega_tau: f64,
    pub beta_hw: f64,
    pub basis: MeasurementBasis,
    pub propagator_method: PropagatorMethod,
}

impl CycleParams {
    pub fn new(
        omega_tau: f64,
        beta_hw: f64,
        basis: MeasurementBasis,
        propagator_method: PropagatorMethod,
    ) -> Result<Self> {
        DriveProtocol::new(omega_tau, Stroke::StrokeI)?;
        ThermalContext::new(beta_hw)?;
        if propagator_method == PropagatorMethod::Sliced(0) {
            return Err(Error::invalid("slice count must be at least 1"));
        }
        Ok(Self {
            omega_tau,
            beta_hw,
            basis,
            propagator_method,
        })
    }

    pub fn exact(omega_tau: f64, beta_hw: f64, alpha: f64, phi: f64) -> Result<Self> {
        Self::new(omega_tau, beta_hw, MeasurementBasis::new(alpha, phi)?, PropagatorMethod::Exact)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Engine,
    NonEngine,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Engine => "engine",
            Regime::NonEngine => "non_engine",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub params: CycleParams,
    pub rho: [QubitMatrix; 4],
    pub sf: [StateFunctions; 4],
    pub w_stroke_i: f64,
    pub q_measure: f64,
    pub w_stroke_iii: f64,
    pub q_thermal: f64,
    pub w_net: f64,
    pub ds_measure: f64,
    pub ds_thermal: f64,
    pub efficiency: Option<f64>,
    pub regime: Regime,
}

/// Everything about a cycle that does not depend on the measurement basis.
///
/// A sweep builds one of these and runs every grid point through it, so the
/// (possibly sliced) propagators are evaluated once.
#[derive(Clone, Debug)]
pub struct CycleSetup {
    omega_tau: f64,
    method: PropagatorMethod,
    ctx: ThermalContext,
    u: StrokeUnitary,
    v: StrokeUnitary,
    hamiltonians: [QubitMatrix; 4],
    rho1: QubitMatrix,
    rho2: QubitMatrix,
}

impl CycleSetup {
    pub fn new(omega_tau: f64, beta_hw: f64, method: PropagatorMethod) -> Result<Self> {
        let ctx = ThermalContext::new(beta_hw)?;
        let u = propagator(&DriveProtocol::new(omega_tau, Stroke::StrokeI)?, method)?;
        let v = propagator(&DriveProtocol::new(omega_tau, Stroke::StrokeII)?, method)?;
        let hamiltonians = corner_hamiltonians();
        let rho1 = gibbs_state(&hamiltonians[0], &ctx)?;
        let rho2 = rho1.conjugate_by(&u.matrix);
        Ok(Self {
            omega_tau,
            method,
            ctx,
            u,
            v,
            hamiltonians,
            rho1,
            rho2,
        })
    }

    pub fn from_params(params: &CycleParams) -> Result<Self> {
        Self::new(params.omega_tau, params.beta_hw, params.propagator_method)
    }

    pub fn omega_tau(&self) -> f64 {
        self.omega_tau
    }

    pub fn beta_hw(&self) -> f64 {
        self.ctx.beta()
    }

    pub fn method(&self) -> PropagatorMethod {
        self.method
    }

    pub fn stroke_unitaries(&self) -> (&StrokeUnitary, &StrokeUnitary) {
        (&self.u, &self.v)
    }

    /// State entering the measurement stroke.
    pub fn pre_measurement_state(&self) -> &QubitMatrix {
        &self.rho2
    }

    pub fn run(&self, basis: MeasurementBasis) -> Result<CycleRecord> {
        let [h1, h2, h3, h4] = self.hamiltonians;
        let rho3 = dephase(&self.rho2, &basis)?;
        let rho4 = rho3.conjugate_by(&self.v.matrix);
        let rho = [self.rho1, self.rho2, rho3, rho4];

        let mut sf = [StateFunctions {
            energy: 0.0,
            entropy: 0.0,
            f_eq: 0.0,
            f_neq: 0.0,
            divergence: 0.0,
        }; 4];
        for (i, (state, h)) in rho.iter().zip(&self.hamiltonians).enumerate() {
            sf[i] = state_functions(state, h, &self.ctx)?;
        }

        let e = sf.map(|s| s.energy);
        let w_stroke_i = e[1] - e[0];
        // Q_M = Tr[H₂(ρ₃ − ρ₂)]; H₃ = H₂ so this equals ℰ₃ − ℰ₂
        let q_measure = h2.trace_product(&(rho3 - self.rho2));
        let w_stroke_iii = e[3] - e[2];
        let q_thermal = h1.trace_product(&(self.rho1 - rho4));
        debug_assert_eq!(h3, h2);
        debug_assert_eq!(h4, h1);
        let w_net = w_stroke_i + w_stroke_iii;
        let ds_measure = sf[2].entropy - sf[1].entropy;
        let ds_thermal = sf[0].entropy - sf[3].entropy;

        let regime = if w_net < 0.0 && q_measure > ZERO_HEAT_TOL {
            Regime::Engine
        } else {
            Regime::NonEngine
        };
        let efficiency = match regime {
            Regime::Engine => Some(-w_net / q_measure),
            Regime::NonEngine => None,
        };

        Ok(CycleRecord {
            params: CycleParams {
                omega_tau: self.omega_tau,
                beta_hw: self.ctx.beta(),
                basis,
                propagator_method: self.method,
            },
            rho,
            sf,
            w_stroke_i,
            q_measure,
            w_stroke_iii,
            q_thermal,
            w_net,
            ds_measure,
            ds_thermal,
            efficiency,
            regime,
        })
    }
}

/// Energy and entropy from traces and spectra; the divergence from the
/// relative-entropy form with the analytic Gibbs logarithm.
fn state_functions(rho: &QubitMatrix, h: &QubitMatrix, ctx: &ThermalContext) -> Result<StateFunctions> {
    let energy = internal_energy(rho, h)?;
    let entropy = von_neumann_entropy(rho)?;
    let (_, f_eq) = partition_and_free_energy(h, ctx)?;
    Ok(StateFunctions {
        energy,
        entropy,
        f_eq,
        f_neq: energy - entropy / ctx.beta(),
        divergence: divergence_to_gibbs(rho, h, ctx)?,
    })
}

pub fn run_cycle(params: &CycleParams) -> Result<CycleRecord> {
    CycleSetup::from_params(params)?.run(params.basis)
}

/// The same quantity evaluated along independent algebraic routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Routes {
    /// Direct trace formula.
    pub direct: f64,
    /// Thermal-divergence form.
    pub divergence: f64,
    /// Free-energy form, where one exists separately from the divergence form.
    pub free_energy: Option<f64>,
}

impl Routes {
    /// Largest pairwise disagreement.
    pub fn discrepancy(&self) -> f64 {
        let mut d = (self.direct - self.divergence).abs();
        if let Some(f) = self.free_energy {
            d = d.max((self.direct - f).abs()).max((self.divergence - f).abs());
        }
        d
    }
}

/// Max route discrepancy per quantity of one record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteDiscrepancies {
    pub w_stroke_i: f64,
    pub q_measure: f64,
    pub w_stroke_iii: f64,
    pub q_thermal: f64,
    pub w_net: f64,
    pub efficiency: Option<f64>,
}

impl RouteDiscrepancies {
    /// Worst discrepancy among the energy-valued quantities.
    pub fn max_energy(&self) -> f64 {
        [self.w_stroke_i, self.q_measure, self.w_stroke_iii, self.q_thermal, self.w_net]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Residuals of the per-record invariants; each is ≥ 0 and should sit at
/// round-off level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantResiduals {
    pub first_law: f64,
    pub isentropy_i: f64,
    pub isentropy_iii: f64,
    pub entropy_balance: f64,
    pub initial_divergence: f64,
    /// How far ΔS_M, or the smallest divergence, dips below zero.
    pub negativity: f64,
}

impl InvariantResiduals {
    pub fn max(&self) -> f64 {
        [
            self.first_law,
            self.isentropy_i,
            self.isentropy_iii,
            self.entropy_balance,
            self.initial_divergence,
            self.negativity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl CycleRecord {
    pub fn beta(&self) -> f64 {
        self.params.beta_hw
    }

    fn div(&self, i: usize) -> f64 {
        self.sf[i - 1].divergence
    }

    fn f_neq(&self, i: usize) -> f64 {
        self.sf[i - 1].f_neq
    }

    fn f_eq(&self, i: usize) -> f64 {
        self.sf[i - 1].f_eq
    }

    /// Engine output `−W`.
    pub fn work_output(&self) -> f64 {
        -self.w_net
    }

    /// `W_I = Tr(ρ₂H₂) − Tr(ρ₁H₁) = D₂/β + F₂^eq − F₁^eq`.
    pub fn work_stroke_i(&self) -> Routes {
        Routes {
            direct: self.w_stroke_i,
            divergence: self.div(2) / self.beta() + self.f_eq(2) - self.f_eq(1),
            free_energy: None,
        }
    }

    /// `Q_M = Tr[H₂(ρ₃ − ρ₂)] = (D₃ − D₂ + ΔS_M)/β = F₃ − F₂ + ΔS_M/β`.
    pub fn quantum_heat(&self) -> Routes {
        let b = self.beta();
        Routes {
            direct: self.q_measure,
            divergence: (self.div(3) - self.div(2) + self.ds_measure) / b,
            free_energy: Some(self.f_neq(3) - self.f_neq(2) + self.ds_measure / b),
        }
    }

    /// `W_III = Tr(ρ₄H₄) − Tr(ρ₃H₃) = (D₄ − D₃)/β + F₄^eq − F₃^eq`.
    pub fn work_stroke_iii(&self) -> Routes {
        Routes {
            direct: self.w_stroke_iii,
            divergence: (self.div(4) - self.div(3)) / self.beta() + self.f_eq(4) - self.f_eq(3),
            free_energy: None,
        }
    }

    /// `Q_T = Tr[H₁(ρ₁ − ρ₄)] = (−D₄ + ΔS_T)/β = F₁ − F₄ + ΔS_T/β`.
    pub fn thermal_heat(&self) -> Routes {
        let b = self.beta();
        Routes {
            direct: self.q_thermal,
            divergence: (-self.div(4) + self.ds_thermal) / b,
            free_energy: Some(self.f_neq(1) - self.f_neq(4) + self.ds_thermal / b),
        }
    }

    /// `W = W_I + W_III = (D₄ + D₂ − D₃)/β = F₂ − F₁ + F₄ − F₃`.
    pub fn net_work(&self) -> Routes {
        Routes {
            direct: self.w_net,
            divergence: (self.div(4) + self.div(2) - self.div(3)) / self.beta(),
            free_energy: Some(self.f_neq(2) - self.f_neq(1) + self.f_neq(4) - self.f_neq(3)),
        }
    }

    /// `η = −W/Q_M` in its three forms; `None` outside the engine regime.
    pub fn efficiency_routes(&self) -> Option<Routes> {
        if self.regime != Regime::Engine {
            return None;
        }
        let b = self.beta();
        let ds = self.ds_measure;
        let (d2, d3, d4) = (self.div(2), self.div(3), self.div(4));
        Some(Routes {
            direct: -self.w_net / self.q_measure,
            divergence: (d3 - d4 - d2) / (d3 - d2 + ds),
            free_energy: Some(
                1.0 + (self.f_neq(1) - self.f_neq(4) - ds / b) / (self.f_neq(3) - self.f_neq(2) + ds / b),
            ),
        })
    }

    pub fn route_discrepancies(&self) -> RouteDiscrepancies {
        RouteDiscrepancies {
            w_stroke_i: self.work_stroke_i().discrepancy(),
            q_measure: self.quantum_heat().discrepancy(),
            w_stroke_iii: self.work_stroke_iii().discrepancy(),
            q_thermal: self.thermal_heat().discrepancy(),
            w_net: self.net_work().discrepancy(),
            efficiency: self.efficiency_routes().map(|r| r.discrepancy()),
        }
    }

    pub fn invariant_residuals(&self) -> InvariantResiduals {
        let s = self.sf.map(|x| x.entropy);
        let min_div = self.sf.iter().map(|x| x.divergence).fold(f64::INFINITY, f64::min);
        InvariantResiduals {
            first_law: (self.w_net + self.q_measure + self.q_thermal).abs(),
            isentropy_i: (s[0] - s[1]).abs(),
            isentropy_iii: (s[2] - s[3]).abs(),
            entropy_balance: (self.ds_thermal + self.ds_measure).abs(),
            initial_divergence: self.sf[0].divergence.abs(),
            negativity: (-self.ds_measure).max(-min_div).max(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::DEFAULT_OMEGA_TAU;
    use crate::qmat::hermitian_eig;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn record(wt: f64, beta: f64, alpha: f64, phi: f64) -> CycleRecord {
        run_cycle(&CycleParams::exact(wt, beta, alpha, phi).unwrap()).unwrap()
    }

    /// Basis whose `|χ₂⟩` is the dominant eigenvector of ρ₂.
    fn eigenbasis_of_rho2(wt: f64, beta: f64) -> MeasurementBasis {
        let setup = CycleSetup::new(wt, beta, PropagatorMethod::Exact).unwrap();
        let p = crate::qmat::pauli_decompose(setup.pre_measurement_state()).unwrap();
        let r = p.norm();
        let [x, y, z] = p.a.map(|c| c / r);
        MeasurementBasis::new(z.clamp(-1.0, 1.0).acos(), y.atan2(x)).unwrap()
    }

    fn assert_routes(rec: &CycleRecord) {
        let d = rec.route_discrepancies();
        assert!(d.max_energy() < 1e-11, "{d:?}");
        if let Some(e) = d.efficiency {
            assert!(e < 1e-9);
        }
        assert!(rec.invariant_residuals().max() < 1e-12, "{:?}", rec.invariant_residuals());
    }

    #[test]
    fn params_validation() {
        assert!(CycleParams::exact(0.0, 1.0, 0.1, 0.1).is_err());
        assert!(CycleParams::exact(1.0, -1.0, 0.1, 0.1).is_err());
        assert!(CycleParams::exact(1.0, 1.0, 4.0, 0.1).is_err());
        let b = MeasurementBasis::new(0.1, 0.1).unwrap();
        assert!(CycleParams::new(1.0, 1.0, b, PropagatorMethod::Sliced(0)).is_err());
    }

    #[test]
    fn default_point_is_consistent() {
        let rec = record(DEFAULT_OMEGA_TAU, 1.0, 0.0, 0.0);
        assert!(rec.invariant_residuals().first_law < 1e-12);
        assert_routes(&rec);
        for r in &rec.rho {
            assert!(r.is_density(1e-10));
        }
    }

    #[test]
    fn eigenbasis_measurement_is_a_no_op() {
        for (wt, beta) in [(0.3, 1.0), (2.0, 0.4), (7.5, 3.0)] {
            let rec = CycleSetup::new(wt, beta, PropagatorMethod::Exact)
                .unwrap()
                .run(eigenbasis_of_rho2(wt, beta))
                .unwrap();
            assert!(rec.rho[2].max_diff(&rec.rho[1]) < 1e-12);
            assert!(rec.ds_measure.abs() < 1e-12);
            assert_abs_diff_eq!(rec.sf[2].divergence, rec.sf[1].divergence, epsilon = 1e-12);
            assert!(rec.q_measure.abs() < 1e-12);
            assert_eq!(rec.regime, Regime::NonEngine);
            assert_eq!(rec.efficiency, None);
            assert!(rec.efficiency_routes().is_none());
            assert_routes(&rec);
        }
    }

    #[test]
    fn sudden_limit_first_stroke_work() {
        let rec = record(1e-6, 1.0, 0.7, 0.2);
        let expected = 0.5 * 0.5f64.tanh();
        assert_abs_diff_eq!(rec.w_stroke_i, expected, epsilon = 1e-5);
        assert_abs_diff_eq!(expected, 0.231059, epsilon = 1e-6);
        let r = rec.work_stroke_i();
        assert!((r.direct - r.divergence).abs() < 1e-11);
    }

    #[test]
    fn hot_limit_is_inert() {
        let rec = record(0.8, 1e-8, 1.3, 2.2);
        assert!(rec.w_stroke_i.abs() < 1e-8);
        assert!(rec.q_measure.abs() < 1e-8);
        assert!(rec.w_stroke_iii.abs() < 1e-8);
        assert!(rec.w_net.abs() < 1e-8);
        assert_eq!(rec.regime, Regime::NonEngine);
    }

    #[test]
    fn commuting_measurement_costs_nothing() {
        let rec = record(DEFAULT_OMEGA_TAU, 1.0, FRAC_PI_2, 0.0);
        assert!(rec.q_measure.abs() < 1e-12);
        let pp = crate::probe::projectors(&rec.params.basis);
        assert!(pp.p1.commutator(&(QubitMatrix::sigma_x() * 0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_post_measurement_state() {
        // ρ₃ = I/2 forces W_III = 0; reachable in the hot limit
        let rec = record(1.0, 1e-9, 1.0, 1.0);
        assert!(rec.rho[2].max_diff(&(QubitMatrix::identity() * 0.5)) < 1e-9);
        assert!(rec.w_stroke_iii.abs() < 1e-9);
    }

    #[test]
    fn trivial_cycle_returns_to_start() {
        // sudden strokes and a z-basis measurement leave ρ₁ untouched
        let rec = record(1e-9, 1.0, 0.0, 0.0);
        assert!(rec.rho[3].max_diff(&rec.rho[0]) < 1e-8);
        assert!(rec.q_thermal.abs() < 1e-8);
        assert!(rec.w_net.abs() < 1e-8);
    }

    #[test]
    fn route_identities_on_a_grid() {
        for &wt in &[1e-3, 0.05, 0.7, 3.0, 10.0] {
            for &beta in &[0.1, 1.0, 4.0, 10.0] {
                let setup = CycleSetup::new(wt, beta, PropagatorMethod::Exact).unwrap();
                for j in 0..7 {
                    for k in 0..8 {
                        let b = MeasurementBasis::new(PI * j as f64 / 6.0, 0.785 * k as f64).unwrap();
                        let rec = setup.run(b).unwrap();
                        assert_routes(&rec);
                        assert_abs_diff_eq!(rec.q_thermal, -(rec.w_net + rec.q_measure), epsilon = 1e-12);
                        let nw = rec.net_work();
                        assert!((nw.divergence - nw.free_energy.unwrap()).abs() < 1e-11);
                        if let Some(eta) = rec.efficiency {
                            assert!(eta > 0.0);
                            if rec.q_thermal < 0.0 {
                                assert!(eta <= 1.0 + 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn regime_flag_follows_signs() {
        let setup = CycleSetup::new(0.1, 1.0, PropagatorMethod::Exact).unwrap();
        let mut saw_engine = false;
        for j in 0..=20 {
            for k in 0..20 {
                let b = MeasurementBasis::new(PI * j as f64 / 20.0, 0.314 * k as f64).unwrap();
                let rec = setup.run(b).unwrap();
                let engine = rec.w_net < 0.0 && rec.q_measure > ZERO_HEAT_TOL;
                assert_eq!(rec.regime == Regime::Engine, engine);
                assert_eq!(rec.efficiency.is_some(), engine);
                saw_engine |= engine;
            }
        }
        assert!(saw_engine);
    }

    #[test]
    fn sliced_and_exact_records_agree() {
        let b = MeasurementBasis::new(1.0, 2.0).unwrap();
        let exact = CycleSetup::new(1.0, 1.0, PropagatorMethod::Exact).unwrap().run(b).unwrap();
        let sliced = CycleSetup::new(1.0, 1.0, PropagatorMethod::Sliced(1 << 16)).unwrap().run(b).unwrap();
        for (a, s) in [
            (exact.w_stroke_i, sliced.w_stroke_i),
            (exact.q_measure, sliced.q_measure),
            (exact.w_stroke_iii, sliced.w_stroke_iii),
            (exact.q_thermal, sliced.q_thermal),
            (exact.sf[3].divergence, sliced.sf[3].divergence),
        ] {
            assert!((a - s).abs() < 1e-8);
        }
        assert_eq!(sliced.params.propagator_method, PropagatorMethod::Sliced(1 << 16));
    }

    #[test]
    fn stored_states_have_expected_spectra() {
        let rec = record(2.0, 1.5, 0.4, 5.0);
        let s1 = hermitian_eig(&rec.rho[0]).unwrap();
        let s2 = hermitian_eig(&rec.rho[1]).unwrap();
        assert_abs_diff_eq!(s1.plus, s2.plus, epsilon = 1e-14);
    }
}
