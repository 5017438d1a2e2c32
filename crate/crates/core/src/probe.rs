//! The measurement stroke: a non-selective projective measurement along a
//! Bloch-sphere direction, i.e. the dephasing channel `ρ → Σ_k π_k ρ π_k`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{QubitMatrix, POSITIVITY_TOL};

/// Measurement direction: colatitude `alpha` from +z, longitude `phi` from +x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    alpha: f64,
    phi: f64,
}

impl MeasurementBasis {
    /// `alpha` must lie in `[0, π]`; `phi` is reduced modulo 2π.
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..=PI).contains(&alpha) {
            return Err(Error::invalid(format!("alpha = {alpha} outside [0, π]")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid(format!("phi = {phi} is not finite")));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { alpha, phi })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit Bloch vector of `|χ₂⟩`.
    pub fn direction(&self) -> [f64; 3] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [sa * cp, sa * sp, ca]
    }
}

/// `|χ₁⟩ = e^{−iφ} sin(α/2)|↑⟩ − cos(α/2)|↓⟩`, `|χ₂⟩ = cos(α/2)|↑⟩ + e^{iφ} sin(α/2)|↓⟩`,
/// with `|↑⟩ = (1, 0)ᵀ`.
pub fn basis_states(basis: &MeasurementBasis) -> ([Complex64; 2], [Complex64; 2]) {
    let (s, c) = (0.5 * basis.alpha).sin_cos();
    let phase = Complex64::from_polar(1.0, basis.phi);
    let chi1 = [phase.conj() * s, Complex64::new(-c, 0.0)];
    let chi2 = [Complex64::new(c, 0.0), phase * s];
    (chi1, chi2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorPair {
    pub p1: QubitMatrix,
    pub p2: QubitMatrix,
}

impl ProjectorPair {
    pub fn as_array(&self) -> [QubitMatrix; 2] {
        [self.p1, self.p2]
    }
}

pub fn projectors(basis: &MeasurementBasis) -> ProjectorPair {
    let (chi1, chi2) = basis_states(basis);
    ProjectorPair {
        p1: QubitMatrix::outer(chi1, chi1),
        p2: QubitMatrix::outer(chi2, chi2),
    }
}

fn check_density(rho: &QubitMatrix) -> Result<()> {
    if rho.is_density(POSITIVITY_TOL) {
        Ok(())
    } else {
        Err(Error::invalid("expected a density matrix (Hermitian, unit trace, positive)"))
    }
}

/// Post-measurement state with the outcome unread.
pub fn dephase(rho: &QubitMatrix, basis: &MeasurementBasis) -> Result<QubitMatrix> {
    check_density(rho)?;
    let ProjectorPair { p1, p2 } = projectors(basis);
    Ok(p1 * *rho * p1 + p2 * *rho * p2)
}

/// Outcome probabilities `(Tr π₁ρ, Tr π₂ρ)`.
pub fn outcome_probs(rho: &QubitMatrix, basis: &MeasurementBasis) -> Result<(f64, f64)> {
    check_density(rho)?;
    let ProjectorPair { p1, p2 } = projectors(basis);
    Ok((p1.trace_product(rho), p2.trace_product(rho)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::hermitian_eig;
    use crate::thermo::von_neumann_entropy;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn inner(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
        u[0].conj() * v[0] + u[1].conj() * v[1]
    }

    fn mixed(a: [f64; 3]) -> QubitMatrix {
        QubitMatrix::from_pauli(0.5, a.map(|c| 0.5 * c))
    }

    #[test]
    fn basis_validation() {
        assert!(MeasurementBasis::new(-0.1, 0.0).is_err());
        assert!(MeasurementBasis::new(PI + 1e-9, 0.0).is_err());
        assert!(MeasurementBasis::new(1.0, f64::INFINITY).is_err());
        let b = MeasurementBasis::new(PI, -FRAC_PI_2).unwrap();
        assert!((b.phi() - 1.5 * PI).abs() < 1e-15);
        let b = MeasurementBasis::new(0.3, TAU).unwrap();
        assert_eq!(b.phi(), 0.0);
        let b = MeasurementBasis::new(0.3, -1e-300).unwrap();
        assert!(b.phi() < TAU);
    }

    #[test]
    fn computational_basis() {
        let (chi1, chi2) = basis_states(&MeasurementBasis::new(0.0, 0.0).unwrap());
        assert_eq!(chi1, [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert_eq!(chi2, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let pp = projectors(&MeasurementBasis::new(0.0, 0.0).unwrap());
        assert_eq!(pp.p1, QubitMatrix::diag(0.0, 1.0));
        assert_eq!(pp.p2, QubitMatrix::diag(1.0, 0.0));
    }

    #[test]
    fn equatorial_basis() {
        let b = MeasurementBasis::new(FRAC_PI_2, 0.0).unwrap();
        let (_, chi2) = basis_states(&b);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((chi2[0] - r).norm() < 1e-15 && (chi2[1] - r).norm() < 1e-15);
        let plus_x = (QubitMatrix::identity() + QubitMatrix::sigma_x()) * 0.5;
        assert!(projectors(&b).p2.max_diff(&plus_x) < 1e-15);
    }

    #[test]
    fn dephase_examples() {
        let b = MeasurementBasis::new(1.2, 4.0).unwrap();
        let half = QubitMatrix::identity() * 0.5;
        assert!(dephase(&half, &b).unwrap().max_diff(&half) < 1e-15);

        // diagonal in the measurement basis
        let pp = projectors(&b);
        let rho = pp.p1 * 0.3 + pp.p2 * 0.7;
        assert!(dephase(&rho, &b).unwrap().max_diff(&rho) < 1e-15);

        let rho = mixed([0.8, 0.0, 0.0]);
        let z = MeasurementBasis::new(0.0, 0.0).unwrap();
        assert!(dephase(&rho, &z).unwrap().max_diff(&half) < 1e-15);
    }

    #[test]
    fn dephase_rejects_non_density() {
        let b = MeasurementBasis::new(0.4, 0.1).unwrap();
        assert!(dephase(&QubitMatrix::sigma_x(), &b).is_err());
        assert!(outcome_probs(&QubitMatrix::diag(1.2, -0.2), &b).is_err());
    }

    #[test]
    fn outcome_prob_examples() {
        let up = QubitMatrix::diag(1.0, 0.0);
        let (p1, p2) = outcome_probs(&(QubitMatrix::identity() * 0.5), &MeasurementBasis::new(2.0, 1.0).unwrap()).unwrap();
        assert!((p1 - 0.5).abs() < 1e-15 && (p2 - 0.5).abs() < 1e-15);
        assert_eq!(outcome_probs(&up, &MeasurementBasis::new(0.0, 0.0).unwrap()).unwrap(), (0.0, 1.0));
        let (p1, p2) = outcome_probs(&up, &MeasurementBasis::new(FRAC_PI_2, 0.0).unwrap()).unwrap();
        assert!((p1 - 0.5).abs() < 1e-15 && (p2 - 0.5).abs() < 1e-15);
    }

    fn bloch_ball() -> impl Strategy<Value = [f64; 3]> {
        (0.0..1.0f64, 0.0..PI, 0.0..TAU).prop_map(|(r, t, p)| {
            [r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn basis_is_orthonormal(alpha in 0.0..=PI, phi in 0.0..TAU) {
            let (c1, c2) = basis_states(&MeasurementBasis::new(alpha, phi).unwrap());
            prop_assert!((inner(&c1, &c1).re - 1.0).abs() < 1e-14);
            prop_assert!((inner(&c2, &c2).re - 1.0).abs() < 1e-14);
            prop_assert!(inner(&c1, &c2).norm() < 1e-14);
        }

        #[test]
        fn projector_pair_invariants(alpha in 0.0..=PI, phi in 0.0..TAU) {
            let b = MeasurementBasis::new(alpha, phi).unwrap();
            let ProjectorPair { p1, p2 } = projectors(&b);
            for p in [p1, p2] {
                prop_assert!((p * p).max_diff(&p) < 1e-12);
                prop_assert!(p.max_diff(&p.dagger()) < 1e-12);
            }
            prop_assert!((p1 * p2).max_abs() < 1e-12);
            prop_assert!((p1 + p2).max_diff(&QubitMatrix::identity()) < 1e-12);
            // p2 projects onto the +direction
            let n = b.direction();
            let expected = QubitMatrix::from_pauli(0.5, n.map(|c| 0.5 * c));
            prop_assert!(p2.max_diff(&expected) < 1e-14);
        }

        #[test]
        fn channel_properties(a in bloch_ball(), alpha in 0.0..=PI, phi in 0.0..TAU) {
            let rho = mixed(a);
            let b = MeasurementBasis::new(alpha, phi).unwrap();
            let out = dephase(&rho, &b).unwrap();
            prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(hermitian_eig(&out).unwrap().minus >= -1e-10);
            prop_assert!(dephase(&out, &b).unwrap().max_diff(&out) < 1e-12);
            let pp = projectors(&b);
            prop_assert!(out.commutator(&pp.p1).max_abs() < 1e-12);
            prop_assert!(von_neumann_entropy(&out).unwrap() >= von_neumann_entropy(&rho).unwrap() - 1e-12);
            let (q1, q2) = outcome_probs(&rho, &b).unwrap();
            let (r1, r2) = outcome_probs(&out, &b).unwrap();
            prop_assert!((q1 + q2 - 1.0).abs() < 1e-12);
            prop_assert!((q1 - r1).abs() < 1e-12 && (q2 - r2).abs() < 1e-12);
        }

        #[test]
        fn phase_covariance(a in bloch_ball(), alpha in 0.0..=PI, phi in 0.0..TAU) {
            let rho = mixed(a);
            let r = QubitMatrix::new([
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, phi)],
            ]);
            let b = MeasurementBasis::new(alpha, phi).unwrap();
            let b0 = MeasurementBasis::new(alpha, 0.0).unwrap();
            let lhs = dephase(&rho, &b).unwrap();
            let inner_state = rho.conjugate_by(&r.dagger());
            let rhs = dephase(&inner_state, &b0).unwrap().conjugate_by(&r);
            prop_assert!(lhs.max_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn entropy_unchanged_when_commuting() {
        let b = MeasurementBasis::new(0.0, 0.0).unwrap();
        let rho = QubitMatrix::diag(0.8, 0.2);
        let s0 = von_neumann_entropy(&rho).unwrap();
        let s1 = von_neumann_entropy(&dephase(&rho, &b).unwrap()).unwrap();
        assert!((s0 - s1).abs() < 1e-15);
    }
}
