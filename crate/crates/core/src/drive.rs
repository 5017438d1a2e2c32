//! Adiabatic-stroke drive protocols and their propagators.
//!
//! Units: ħ = ω = 1, so energies are in ħω and the stroke duration τ equals
//! the dimensionless drive strength ωτ. Both strokes keep the spectrum fixed at
//! ±1/2 and only rotate the quantization axis in the x–z plane:
//!
//! ```text
//! H(t) = ½ (cos θ(t) σz + sin θ(t) σx)
//! stroke I : θ(t) = π t / 2τ,        t ∈ [0, τ]
//! stroke II: θ(t) = π (2τ − t) / 2τ, t ∈ [τ, 2τ]
//! ```
//!
//! Since `H(t) = R(t) (½σz) R(t)†` with `R(t) = exp(−i θ(t) σy / 2)`, the
//! generator in the frame co-rotating with `R` is constant,
//! `½σz − (θ̇/2) σy`, and the time-ordered exponential has a closed form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{unitary_axis_angle, QubitMatrix};

/// ωτ for ħω = 0.5 peV and τ = 8.4 µs.
pub const DEFAULT_OMEGA_TAU: f64 = 6.381e-3;

/// Slice count used when the sliced propagator serves as a verification oracle.
pub const DEFAULT_SLICES: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stroke {
    /// `H₁ = ½σz → H₂ = ½σx` over `[0, τ]`.
    StrokeI,
    /// Time-reversed drive, `H₃ = ½σx → H₄ = ½σz` over `[τ, 2τ]`.
    StrokeII,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveProtocol {
    omega_tau: f64,
    branch: Stroke,
}

impl DriveProtocol {
    pub fn new(omega_tau: f64, branch: Stroke) -> Result<Self> {
        if !(omega_tau.is_finite() && omega_tau > 0.0) {
            return Err(Error::invalid(format!(
                "omega_tau must be positive and finite, got {omega_tau}"
            )));
        }
        Ok(Self { omega_tau, branch })
    }

    pub fn omega_tau(&self) -> f64 {
        self.omega_tau
    }

    pub fn branch(&self) -> Stroke {
        self.branch
    }

    /// Stroke duration τ in units of 1/ω.
    pub fn duration(&self) -> f64 {
        self.omega_tau
    }

    /// `(start, end)` of the stroke window.
    pub fn window(&self) -> (f64, f64) {
        let tau = self.omega_tau;
        match self.branch {
            Stroke::StrokeI => (0.0, tau),
            Stroke::StrokeII => (tau, 2.0 * tau),
        }
    }

    /// Drive angle θ(t) in the x–z plane, measured from +z.
    pub fn angle(&self, t: f64) -> f64 {
        let tau = self.omega_tau;
        match self.branch {
            Stroke::StrokeI => PI * t / (2.0 * tau),
            Stroke::StrokeII => PI * (2.0 * tau - t) / (2.0 * tau),
        }
    }

    /// dθ/dt, constant over the stroke.
    fn angular_rate(&self) -> f64 {
        let rate = PI / (2.0 * self.omega_tau);
        match self.branch {
            Stroke::StrokeI => rate,
            Stroke::StrokeII => -rate,
        }
    }

    /// Hamiltonian at time `t` (in ħω). Errors outside the stroke window.
    pub fn hamiltonian_at(&self, t: f64) -> Result<QubitMatrix> {
        let (start, end) = self.window();
        // relative slack so that t = 2τ computed as τ + τ is accepted
        let slack = 1e-12 * end.max(1.0);
        if !t.is_finite() || t < start - slack || t > end + slack {
            return Err(Error::invalid(format!(
                "t = {t} outside stroke window [{start}, {end}]"
            )));
        }
        Ok(drive_hamiltonian(self.angle(t.clamp(start, end))))
    }
}

/// `½(cos θ σz + sin θ σx)`.
pub fn drive_hamiltonian(theta: f64) -> QubitMatrix {
    let (s, c) = theta.sin_cos();
    QubitMatrix::from_pauli(0.0, [0.5 * s, 0.0, 0.5 * c])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "slices", rename_all = "snake_case")]
pub enum PropagatorMethod {
    #[default]
    Exact,
    Sliced(usize),
}


impl std::fmt::Display for PropagatorMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PropagatorMethod::Exact => write!(f, "exact"),
            PropagatorMethod::Sliced(n) => write!(f, "sliced:{n}"),
        }
    }
}

impl std::str::FromStr for PropagatorMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "exact" => Ok(PropagatorMethod::Exact),
            None if s == "sliced" => Ok(PropagatorMethod::Sliced(DEFAULT_SLICES)),
            Some(("sliced", n)) => match n.parse::<usize>() {
                Ok(n) if n > 0 => Ok(PropagatorMethod::Sliced(n)),
                _ => Err(Error::invalid(format!("slice count must be a positive integer, got {n:?}"))),
            },
            _ => Err(Error::invalid(format!(
                "unknown propagator method {s:?} (expected exact or sliced:N)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrokeUnitary {
    pub matrix: QubitMatrix,
    pub protocol: DriveProtocol,
    pub method: PropagatorMethod,
}

/// Rotating-frame closed form of the stroke propagator.
pub fn propagator_exact(protocol: &DriveProtocol) -> StrokeUnitary {
    let tau = protocol.duration();
    // H_eff = ½σz − (θ̇/2)σy
    let bz = 0.5;
    let by = -0.5 * protocol.angular_rate();
    let strength = (by * by + bz * bz).sqrt();
    let axis = [0.0, by / strength, bz / strength];
    let frame = unitary_axis_angle(axis, strength * tau).expect("normalized axis");
    // R(θ) = exp(−i θ σy / 2); only θ = π/2 is needed at the stroke boundaries.
    let quarter_turn = |sign: f64| unitary_axis_angle([0.0, 1.0, 0.0], sign * FRAC_PI_4).expect("unit axis");
    let matrix = match protocol.branch() {
        Stroke::StrokeI => quarter_turn(1.0) * frame,
        Stroke::StrokeII => frame * quarter_turn(-1.0),
    };
    StrokeUnitary {
        matrix,
        protocol: *protocol,
        method: PropagatorMethod::Exact,
    }
}

/// Midpoint time-sliced product `∏ exp(−i H(t_k + Δt/2) Δt)`, later slices on the left.
pub fn propagator_sliced(protocol: &DriveProtocol, slices: usize) -> Result<StrokeUnitary> {
    if slices == 0 {
        return Err(Error::invalid("slice count must be at least 1"));
    }
    let (start, _) = protocol.window();
    let dt = protocol.duration() / slices as f64;
    let mut u = QubitMatrix::identity();
    for k in 0..slices {
        let theta = protocol.angle(start + (k as f64 + 0.5) * dt);
        let (s, c) = theta.sin_cos();
        // H = ½ n·σ, so exp(−iHΔt) is a rotation by Δt/2 about n
        let step = unitary_axis_angle([s, 0.0, c], 0.5 * dt).expect("unit axis");
        u = step * u;
    }
    Ok(StrokeUnitary {
        matrix: u,
        protocol: *protocol,
        method: PropagatorMethod::Sliced(slices),
    })
}

pub fn propagator(protocol: &DriveProtocol, method: PropagatorMethod) -> Result<StrokeUnitary> {
    match method {
        PropagatorMethod::Exact => Ok(propagator_exact(protocol)),
        PropagatorMethod::Sliced(n) => propagator_sliced(protocol, n),
    }
}

/// Hamiltonians at the four cycle corners: `H₁ = H₄ = ½σz`, `H₂ = H₃ = ½σx`.
pub fn corner_hamiltonians() -> [QubitMatrix; 4] {
    let h1 = drive_hamiltonian(0.0);
    let h2 = drive_hamiltonian(FRAC_PI_2);
    [h1, h2, h2, h1]
}
