//! Thermodynamic state functions of a spin state relative to a Hamiltonian at
//! inverse temperature β.
//!
//! Energies are in ħω, entropies and divergences in nats. The thermal
//! divergence is available through two independent routes:
//! [`divergence`] evaluates `Tr[ρ(ln ρ − ln σ)]` against an explicit Gibbs
//! state, while [`thermal_divergence`] uses `β(ℰ − F_eq) − S`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{hermitian_eig, x_ln_x, QubitMatrix, POSITIVITY_TOL};

/// Smallest eigenvalue accepted for a divergence reference state.
pub const FULL_RANK_TOL: f64 = 1e-14;

/// Inverse temperature βħω.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalContext {
    beta_hw: f64,
}

impl ThermalContext {
    pub fn new(beta_hw: f64) -> Result<Self> {
        if !(beta_hw.is_finite() && beta_hw > 0.0) {
            return Err(Error::invalid(format!(
                "beta_hw must be positive and finite, got {beta_hw}"
            )));
        }
        Ok(Self { beta_hw })
    }

    pub fn beta(&self) -> f64 {
        self.beta_hw
    }
}

/// Energy, entropy, free energies and thermal divergence of one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFunctions {
    pub energy: f64,
    pub entropy: f64,
    pub f_eq: f64,
    pub f_neq: f64,
    pub divergence: f64,
}

fn check_density(rho: &QubitMatrix) -> Result<()> {
    if rho.is_density(POSITIVITY_TOL) {
        Ok(())
    } else {
        Err(Error::invalid("expected a density matrix (Hermitian, unit trace, positive)"))
    }
}

fn check_hermitian(h: &QubitMatrix) -> Result<()> {
    hermitian_eig(h).map(|_| ())
}

/// `e^{−βH} / Z`.
pub fn gibbs_state(h: &QubitMatrix, ctx: &ThermalContext) -> Result<QubitMatrix> {
    let spec = hermitian_eig(h)?;
    let beta = ctx.beta();
    // shift by the ground energy so that the exponentials never overflow
    let ground = spec.minus;
    let unnormalized = spec.map(|e| (-beta * (e - ground)).exp())?;
    let z = unnormalized.trace().re;
    Ok(unnormalized * z.recip())
}

/// `(Z, F_eq)` with `Z = Tr e^{−βH}` and `F_eq = −ln Z / β`.
pub fn partition_and_free_energy(h: &QubitMatrix, ctx: &ThermalContext) -> Result<(f64, f64)> {
    let spec = hermitian_eig(h)?;
    let beta = ctx.beta();
    let (hi, lo) = (spec.plus, spec.minus);
    // ln Z = −β lo + ln(1 + e^{−β(hi − lo)}), stable for large β
    let ln_z = -beta * lo + (-beta * (hi - lo)).exp().ln_1p();
    Ok((ln_z.exp(), -ln_z / beta))
}

/// `−Tr ρ ln ρ` over eigenvalues clamped to `[0, 1]`.
pub fn von_neumann_entropy(rho: &QubitMatrix) -> Result<f64> {
    check_density(rho)?;
    let spec = hermitian_eig(rho)?;
    if spec.is_degenerate() {
        return Ok(-2.0 * x_ln_x(spec.plus));
    }
    Ok(-(x_ln_x(spec.plus) + x_ln_x(spec.minus)))
}

/// `Tr(Hρ)`.
pub fn internal_energy(rho: &QubitMatrix, h: &QubitMatrix) -> Result<f64> {
    check_density(rho)?;
    check_hermitian(h)?;
    Ok(h.trace_product(rho))
}

/// Umegaki relative entropy `Tr[ρ(ln ρ − ln σ)]`, with `ln σ` from the spectrum of `σ`.
pub fn divergence(rho: &QubitMatrix, sigma: &QubitMatrix) -> Result<f64> {
    check_density(rho)?;
    check_density(sigma)?;
    let sigma_spec = hermitian_eig(sigma)?;
    if sigma_spec.minus < FULL_RANK_TOL {
        return Err(Error::SingularReference(sigma_spec.minus));
    }
    let log_sigma = sigma_spec.map(f64::ln)?;
    let neg_entropy = -von_neumann_entropy(rho)?;
    Ok(neg_entropy - log_sigma.trace_product(rho))
}

/// `β(ℰ − F_eq) − S`.
pub fn thermal_divergence(rho: &QubitMatrix, h: &QubitMatrix, ctx: &ThermalContext) -> Result<f64> {
    let energy = internal_energy(rho, h)?;
    let (_, f_eq) = partition_and_free_energy(h, ctx)?;
    let entropy = von_neumann_entropy(rho)?;
    Ok(ctx.beta() * (energy - f_eq) - entropy)
}

/// `ℰ − S/β`.
pub fn noneq_free_energy(rho: &QubitMatrix, h: &QubitMatrix, ctx: &ThermalContext) -> Result<f64> {
    Ok(internal_energy(rho, h)? - von_neumann_entropy(rho)? / ctx.beta())
}

/// `ln σ_eq = −β(H − F_eq·I)`, the analytic logarithm of the Gibbs state of `h`.
pub fn gibbs_log(h: &QubitMatrix, ctx: &ThermalContext) -> Result<QubitMatrix> {
    let (_, f_eq) = partition_and_free_energy(h, ctx)?;
    Ok((*h - QubitMatrix::identity() * f_eq) * -ctx.beta())
}

/// Divergence against the Gibbs state of `h`, using the analytic `ln σ_eq`.
pub fn divergence_to_gibbs(rho: &QubitMatrix, h: &QubitMatrix, ctx: &ThermalContext) -> Result<f64> {
    let log_sigma = gibbs_log(h, ctx)?;
    let neg_entropy = -von_neumann_entropy(rho)?;
    Ok(neg_entropy - log_sigma.trace_product(rho))
}

impl StateFunctions {
    pub fn evaluate(rho: &QubitMatrix, h: &QubitMatrix, ctx: &ThermalContext) -> Result<Self> {
        let energy = internal_energy(rho, h)?;
        let entropy = von_neumann_entropy(rho)?;
        let (_, f_eq) = partition_and_free_energy(h, ctx)?;
        let beta = ctx.beta();
        Ok(Self {
            energy,
            entropy,
            f_eq,
            f_neq: energy - entropy / beta,
            divergence: beta * (energy - f_eq) - entropy,
        })
    }
}
