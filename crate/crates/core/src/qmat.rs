//! Closed-form 2×2 complex matrix algebra.
//!
//! Every Hermitian 2×2 matrix is `a0·I + a·σ`, so its spectrum is `a0 ± |a|`
//! and its spectral projectors are `(I ± â·σ)/2`. All scalar functions of
//! Hermitian matrices in this crate go through that decomposition; there is no
//! iterative eigensolver anywhere.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tolerated anti-Hermitian part (max-entry) of a nominally Hermitian matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Smallest tolerated eigenvalue of a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Below this Bloch-vector length the spectrum is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitMatrix {
    pub entries: [[Complex64; 2]; 2],
}

impl QubitMatrix {
    pub const fn new(entries: [[Complex64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub const fn zero() -> Self {
        Self::new([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Self::new([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn sigma_x() -> Self {
        Self::new([[ZERO, ONE], [ONE, ZERO]])
    }

    pub const fn sigma_y() -> Self {
        Self::new([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub const fn sigma_z() -> Self {
        Self::new([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]])
    }

    pub fn diag(d0: f64, d1: f64) -> Self {
        Self::new([[d0.into(), ZERO], [ZERO, d1.into()]])
    }

    /// `a0·I + a·σ`.
    pub fn from_pauli(a0: f64, a: [f64; 3]) -> Self {
        let [ax, ay, az] = a;
        Self::new([
            [Complex64::new(a0 + az, 0.0), Complex64::new(ax, -ay)],
            [Complex64::new(ax, ay), Complex64::new(a0 - az, 0.0)],
        ])
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: [Complex64; 2], v: [Complex64; 2]) -> Self {
        Self::new([
            [u[0] * v[0].conj(), u[0] * v[1].conj()],
            [u[1] * v[0].conj(), u[1] * v[1].conj()],
        ])
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.entries;
        Self::new([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Real part of `Tr(self · other)`; the expectation value when both are Hermitian.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let a = &self.entries;
        let b = &other.entries;
        (a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]).re
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_entries(|z| z * s)
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.dagger()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Max-entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Max-entry distance to `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_finite() && self.max_diff(&self.dagger()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_finite() && (*self * self.dagger()).max_diff(&Self::identity()) <= tol
    }

    /// Hermitian, unit trace, and both eigenvalues ≥ `-tol`.
    pub fn is_density(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) || (self.trace() - ONE).norm() > tol {
            return false;
        }
        match pauli_decompose(self) {
            Ok(p) => p.a0 - p.norm() >= -tol,
            Err(_) => false,
        }
    }

    fn map_entries(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let m = &self.entries;
        Self::new([[f(m[0][0]), f(m[0][1])], [f(m[1][0]), f(m[1][1])]])
    }

    fn zip_entries(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let a = &self.entries;
        let b = &other.entries;
        Self::new([
            [f(a[0][0], b[0][0]), f(a[0][1], b[0][1])],
            [f(a[1][0], b[1][0]), f(a[1][1], b[1][1])],
        ])
    }
}

impl Default for QubitMatrix {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for QubitMatrix {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip_entries(&rhs, |a, b| a + b)
    }
}

impl Sub for QubitMatrix {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip_entries(&rhs, |a, b| a - b)
    }
}

impl Neg for QubitMatrix {
    type Output = Self;
    fn neg(self) -> Self {
        self.map_entries(|z| -z)
    }
}

impl Mul for QubitMatrix {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        Self::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<f64> for QubitMatrix {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.map_entries(|z| z * rhs)
    }
}

impl Mul<QubitMatrix> for f64 {
    type Output = QubitMatrix;
    fn mul(self, rhs: QubitMatrix) -> QubitMatrix {
        rhs * self
    }
}

impl Mul<Complex64> for QubitMatrix {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        self.scale(rhs)
    }
}

/// Coordinates of a Hermitian matrix in the `{I, σx, σy, σz}` basis: `M = a0·I + a·σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliDecomposition {
    pub a0: f64,
    pub a: [f64; 3],
}

impl PauliDecomposition {
    pub fn norm(&self) -> f64 {
        let [x, y, z] = self.a;
        (x * x + y * y + z * z).sqrt()
    }

    pub fn reconstruct(&self) -> QubitMatrix {
        QubitMatrix::from_pauli(self.a0, self.a)
    }
}

/// Splits a Hermitian matrix into `a0 = Tr(M)/2`, `a_i = Tr(σ_i M)/2`.
pub fn pauli_decompose(m: &QubitMatrix) -> Result<PauliDecomposition> {
    let e = &m.entries;
    let a0 = (e[0][0] + e[1][1]) * 0.5;
    let ax = (e[0][1] + e[1][0]) * 0.5;
    let ay = I * (e[0][1] - e[1][0]) * 0.5;
    let az = (e[0][0] - e[1][1]) * 0.5;
    let coords = [a0, ax, ay, az];
    if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let worst = coords.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if worst > HERMITIAN_TOL {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (imaginary Pauli coordinate {worst:e})"
        )));
    }
    Ok(PauliDecomposition {
        a0: a0.re,
        a: [ax.re, ay.re, az.re],
    })
}

/// Spectral decomposition `M = λ₊P₊ + λ₋P₋` of a Hermitian 2×2 matrix.
///
/// At degeneracy (`|a| < DEGENERACY_TOL`) both eigenvalues equal `a0` and the
/// projectors are `P₊ = I`, `P₋ = 0`, so every spectral function reduces to
/// `f(a0)·I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    pub plus: f64,
    pub minus: f64,
    pub proj_plus: QubitMatrix,
    pub proj_minus: QubitMatrix,
}

impl Spectrum {
    pub fn is_degenerate(&self) -> bool {
        self.proj_minus == QubitMatrix::zero()
    }

    pub fn reconstruct(&self) -> QubitMatrix {
        self.proj_plus * self.plus + self.proj_minus * self.minus
    }

    /// `f(λ₊)P₊ + f(λ₋)P₋`; errors if `f` is not finite at an eigenvalue.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<QubitMatrix> {
        let fp = f(self.plus);
        if !fp.is_finite() {
            return Err(Error::Domain(self.plus));
        }
        if self.is_degenerate() {
            return Ok(self.proj_plus * fp);
        }
        let fm = f(self.minus);
        if !fm.is_finite() {
            return Err(Error::Domain(self.minus));
        }
        Ok(self.proj_plus * fp + self.proj_minus * fm)
    }
}

pub fn hermitian_eig(m: &QubitMatrix) -> Result<Spectrum> {
    let p = pauli_decompose(m)?;
    let r = p.norm();
    if r < DEGENERACY_TOL {
        return Ok(Spectrum {
            plus: p.a0,
            minus: p.a0,
            proj_plus: QubitMatrix::identity(),
            proj_minus: QubitMatrix::zero(),
        });
    }
    let n = p.a.map(|c| c / r);
    let half_n = QubitMatrix::from_pauli(0.0, n) * 0.5;
    let half_i = QubitMatrix::identity() * 0.5;
    Ok(Spectrum {
        plus: p.a0 + r,
        minus: p.a0 - r,
        proj_plus: half_i + half_n,
        proj_minus: half_i - half_n,
    })
}

/// Applies a real scalar function to a Hermitian matrix through its spectrum.
pub fn apply_fn_hermitian(m: &QubitMatrix, f: impl Fn(f64) -> f64) -> Result<QubitMatrix> {
    hermitian_eig(m)?.map(f)
}

/// `x ln x` on `[0, 1]` with the `0·ln 0 = 0` convention; input is clamped first.
pub fn x_ln_x(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `exp(-iθ n·σ) = cos θ·I − i sin θ·(n·σ)` for a unit axis `n`.
pub fn unitary_axis_angle(n: [f64; 3], theta: f64) -> Result<QubitMatrix> {
    let len = n.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !theta.is_finite() || !len.is_finite() || (len - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!(
            "rotation axis must be a unit vector (|n| = {len}) and angle finite (θ = {theta})"
        )));
    }
    let (s, c) = theta.sin_cos();
    let [x, y, z] = n;
    // cos θ·I − i sin θ·(n·σ), written out entrywise
    Ok(QubitMatrix::new([
        [Complex64::new(c, -s * z), Complex64::new(-s * y, -s * x)],
        [Complex64::new(s * y, -s * x), Complex64::new(c, s * z)],
    ]))
}
