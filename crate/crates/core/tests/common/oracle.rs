//! Reference implementations on nalgebra: Padé matrix exponentials and a
//! general Hermitian eigensolver, sharing no code with the crate.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use nalgebra::{Complex, Matrix2};
use rand::Rng;
use spin_engine::qmat::QubitMatrix;

pub type C = Complex<f64>;
pub type M = Matrix2<C>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn sx() -> M {
    M::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

pub fn sy() -> M {
    M::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

pub fn sz() -> M {
    M::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

pub fn to_na(q: &QubitMatrix) -> M {
    let e = q.entries;
    M::new(e[0][0], e[0][1], e[1][0], e[1][1])
}

pub fn from_na(m: &M) -> QubitMatrix {
    QubitMatrix {
        entries: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
    }
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `[½σz, ½σx, ½σx, ½σz]`.
pub fn corner_hamiltonians() -> [M; 4] {
    let hz = sz() * c(0.5, 0.);
    let hx = sx() * c(0.5, 0.);
    [hz, hx, hx, hz]
}

pub fn expectation(rho: &M, h: &M) -> f64 {
    (rho * h).trace().re
}

fn eig(m: &M) -> (nalgebra::Vector2<f64>, M) {
    let e = nalgebra::linalg::SymmetricEigen::new(*m);
    (e.eigenvalues, e.eigenvectors)
}

fn spectral_fn(m: &M, f: impl Fn(f64) -> f64) -> M {
    let (vals, vecs) = eig(m);
    let d = M::from_diagonal(&nalgebra::Vector2::new(c(f(vals[0]), 0.), c(f(vals[1]), 0.)));
    vecs * d * vecs.adjoint()
}

pub fn entropy(rho: &M) -> f64 {
    let (vals, _) = eig(rho);
    vals.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// `e^{−βH}/Z` from the Padé exponential.
pub fn gibbs(h: &M, beta: f64) -> M {
    let e = (h * c(-beta, 0.)).exp();
    let z = e.trace();
    e / z
}

pub fn free_energy_eq(h: &M, beta: f64) -> f64 {
    -(h * c(-beta, 0.)).exp().trace().re.ln() / beta
}

/// `Tr ρ ln ρ − Tr ρ ln σ` with both logarithms from eigendecompositions.
pub fn divergence(rho: &M, sigma: &M) -> f64 {
    let log_sigma = spectral_fn(sigma, f64::ln);
    -entropy(rho) - (rho * log_sigma).trace().re
}

fn random_unit(rng: &mut impl Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let t: f64 = rng.gen_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    [s * t.cos(), s * t.sin(), z]
}

fn pauli(a0: f64, a: [f64; 3]) -> M {
    M::identity() * c(a0, 0.) + sx() * c(a[0], 0.) + sy() * c(a[1], 0.) + sz() * c(a[2], 0.)
}

pub fn random_density(rng: &mut impl Rng) -> M {
    let r: f64 = rng.gen_range(0.0..1.0);
    pauli(0.5, random_unit(rng).map(|x| 0.5 * r * x))
}

/// Gap between 0.1 and 1, offset in [−1, 1].
pub fn random_hamiltonian(rng: &mut impl Rng) -> M {
    let a0 = rng.gen_range(-1.0..=1.0);
    let r = rng.gen_range(0.05..=0.5);
    pauli(a0, random_unit(rng).map(|x| r * x))
}

fn expm(m: &M) -> M {
    m.exp()
}

/// Rotating-frame propagator of either stroke, by Padé exponentials.
pub fn exact_propagator(omega_tau: f64, second_stroke: bool) -> M {
    let tau = omega_tau;
    let k = PI / (4.0 * tau);
    let i = c(0., 1.);
    let quarter = |sign: f64| expm(&(sy() * (-i * sign * FRAC_PI_4)));
    if second_stroke {
        let h = sz() * c(0.5, 0.) + sy() * c(k, 0.);
        expm(&(h * (-i * tau))) * quarter(-1.0)
    } else {
        let h = sz() * c(0.5, 0.) - sy() * c(k, 0.);
        quarter(1.0) * expm(&(h * (-i * tau)))
    }
}

/// `H(t) = ½(cos θ σz + sin θ σx)`.
pub fn drive(theta: f64) -> M {
    (sz() * c(theta.cos(), 0.) + sx() * c(theta.sin(), 0.)) * c(0.5, 0.)
}

/// Midpoint product over `n` slices, built from `H(t)` with Padé exponentials.
pub fn midpoint_product(omega_tau: f64, second_stroke: bool, n: usize) -> M {
    let tau = omega_tau;
    let dt = tau / n as f64;
    let i = c(0., 1.);
    let mut u = M::identity();
    for k in 0..n {
        let t = (k as f64 + 0.5) * dt;
        let theta = if second_stroke {
            PI * (tau - t) / (2.0 * tau)
        } else {
            PI * t / (2.0 * tau)
        };
        u = expm(&(drive(theta) * (-i * dt))) * u;
    }
    u
}

/// Brute-force cycle: states after each stroke from the given stroke unitaries.
pub fn cycle_states(u: &M, v: &M, beta: f64, alpha: f64, phi: f64) -> [M; 4] {
    let h = corner_hamiltonians();
    let rho1 = gibbs(&h[0], beta);
    let rho2 = u * rho1 * u.adjoint();
    let n = [alpha.sin() * phi.cos(), alpha.sin() * phi.sin(), alpha.cos()];
    let p_plus = pauli(0.5, n.map(|x| 0.5 * x));
    let p_minus = M::identity() - p_plus;
    let rho3 = p_plus * rho2 * p_plus + p_minus * rho2 * p_minus;
    let rho4 = v * rho3 * v.adjoint();
    [rho1, rho2, rho3, rho4]
}
