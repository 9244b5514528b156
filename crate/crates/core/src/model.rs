//! The three-level Λ model driven along the dark-state geodesic.
//!
//! Basis order is `{|0>, |-1>, |+1>}` everywhere. The dark state rotates from
//! `|-1>` at `θ = 0` to `|+1>` at `θ = π/2`; the two bright states sit at
//! energies `±Ω` and carry the intermediate level `|0>`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::smallmat::{expm_unitary, ComplexMatrix, StateVector};

pub const LEVEL_0: usize = 0;
pub const LEVEL_MINUS1: usize = 1;
pub const LEVEL_PLUS1: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("Rabi parameter must be positive and finite, got {0}")]
    InvalidOmega(f64),
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

/// Parameters of the jump Hamiltonian. Frequencies in rad/µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpParams {
    omega: f64,
    theta: f64,
    delta: f64,
}

impl JumpParams {
    pub fn new(omega: f64, theta: f64, delta: f64) -> Result<Self, ModelError> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(ModelError::InvalidOmega(omega));
        }
        if !theta.is_finite() {
            return Err(ModelError::NonFinite { name: "theta", value: theta });
        }
        if !delta.is_finite() {
            return Err(ModelError::NonFinite { name: "delta", value: delta });
        }
        Ok(Self { omega, theta, delta })
    }

    pub fn resonant(omega: f64, theta: f64) -> Result<Self, ModelError> {
        Self::new(omega, theta, 0.0)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Drive amplitudes `(Ω_-, Ω_+) = (2Ω sinθ, 2Ω cosθ)`.
    pub fn drive_amplitudes(&self) -> (f64, f64) {
        (2.0 * self.omega * self.theta.sin(), 2.0 * self.omega * self.theta.cos())
    }
}

/// `H = Ω[cosθ|+1> - sinθ|-1>]<0| + h.c. + Δ|-1><-1| - Δ|+1><+1|`.
pub fn hamiltonian_jump(p: &JumpParams) -> ComplexMatrix {
    let (s, c) = p.theta.sin_cos();
    let mut h = ComplexMatrix::zeros();
    h[(LEVEL_PLUS1, LEVEL_0)] = C64::new(p.omega * c, 0.0);
    h[(LEVEL_0, LEVEL_PLUS1)] = C64::new(p.omega * c, 0.0);
    h[(LEVEL_MINUS1, LEVEL_0)] = C64::new(-p.omega * s, 0.0);
    h[(LEVEL_0, LEVEL_MINUS1)] = C64::new(-p.omega * s, 0.0);
    h[(LEVEL_MINUS1, LEVEL_MINUS1)] = C64::new(p.delta, 0.0);
    h[(LEVEL_PLUS1, LEVEL_PLUS1)] = C64::new(-p.delta, 0.0);
    h
}

/// The constant generator that transports the eigenbasis along θ.
///
/// `G = i|+1><-1| - i|-1><+1|`, so that `exp(-iGθ)|-1> = cosθ|-1> + sinθ|+1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    matrix: ComplexMatrix,
}

impl Generator {
    pub fn new() -> Self {
        let mut g = ComplexMatrix::zeros();
        g[(LEVEL_PLUS1, LEVEL_MINUS1)] = C64::new(0.0, 1.0);
        g[(LEVEL_MINUS1, LEVEL_PLUS1)] = C64::new(0.0, -1.0);
        Self { matrix: g }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `exp(-iGθ)`, in closed form (a real rotation in the `{|-1>, |+1>}` plane).
    pub fn transport(&self, theta: f64) -> ComplexMatrix {
        let (s, c) = theta.sin_cos();
        let mut u = ComplexMatrix::zeros();
        u[(LEVEL_0, LEVEL_0)] = C64::new(1.0, 0.0);
        u[(LEVEL_MINUS1, LEVEL_MINUS1)] = C64::new(c, 0.0);
        u[(LEVEL_PLUS1, LEVEL_PLUS1)] = C64::new(c, 0.0);
        u[(LEVEL_PLUS1, LEVEL_MINUS1)] = C64::new(s, 0.0);
        u[(LEVEL_MINUS1, LEVEL_PLUS1)] = C64::new(-s, 0.0);
        u
    }
}

impl Default for Generator {
    fn default() -> Self {
        Self::new()
    }
}

/// Labels of the instantaneous eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Eigenstate {
    Dark,
    BrightPlus,
    BrightMinus,
}

impl Eigenstate {
    pub const ALL: [Eigenstate; 3] = [Eigenstate::Dark, Eigenstate::BrightPlus, Eigenstate::BrightMinus];

    pub fn index(self) -> usize {
        match self {
            Eigenstate::Dark => 0,
            Eigenstate::BrightPlus => 1,
            Eigenstate::BrightMinus => 2,
        }
    }

    /// Energy in units of Ω at zero detuning.
    pub fn energy_sign(self) -> f64 {
        match self {
            Eigenstate::Dark => 0.0,
            Eigenstate::BrightPlus => 1.0,
            Eigenstate::BrightMinus => -1.0,
        }
    }
}

/// `sinθ|+1> + cosθ|-1>`.
pub fn dark_state(theta: f64) -> StateVector {
    let (s, c) = theta.sin_cos();
    let mut a = [0.0; 3];
    a[LEVEL_MINUS1] = c;
    a[LEVEL_PLUS1] = s;
    StateVector::from_real(a)
}

/// `(|μ+>, |μ->) = exp(-iGθ)(|+1> ± |0>)/√2`.
pub fn bright_states(theta: f64) -> (StateVector, StateVector) {
    let (s, c) = theta.sin_cos();
    let r = FRAC_1_SQRT_2;
    let mut plus = [0.0; 3];
    plus[LEVEL_0] = r;
    plus[LEVEL_MINUS1] = -r * s;
    plus[LEVEL_PLUS1] = r * c;
    let mut minus = plus;
    minus[LEVEL_0] = -r;
    (StateVector::from_real(plus), StateVector::from_real(minus))
}

/// Eigenbasis at θ in [`Eigenstate::ALL`] order: `(d, μ+, μ-)`.
pub fn eigenbasis(theta: f64) -> [StateVector; 3] {
    let (plus, minus) = bright_states(theta);
    [dark_state(theta), plus, minus]
}

pub fn eigenstate(which: Eigenstate, theta: f64) -> StateVector {
    eigenbasis(theta)[which.index()]
}

/// `exp(-iGθ) H(0) exp(iGθ)` with `H(0)` the resonant jump Hamiltonian at θ = 0.
///
/// The exponentials are computed numerically from `G` rather than from the
/// closed-form rotation, so this is an independent route to `H(θ)`.
pub fn conjugate_by_generator(theta: f64, omega: f64) -> Result<ComplexMatrix, ModelError> {
    let h0 = hamiltonian_jump(&JumpParams::resonant(omega, 0.0)?);
    let g = Generator::new();
    let fwd = expm_unitary(g.matrix(), theta).expect("generator is Hermitian");
    let back = expm_unitary(g.matrix(), -theta).expect("generator is Hermitian");
    Ok(fwd * h0 * back)
}

/// `<n(0)|G|m(0)>`, the constant coefficient of the nonadiabatic coupling.
pub fn generator_coupling(n: Eigenstate, m: Eigenstate) -> C64 {
    let basis = eigenbasis(0.0);
    Generator::new().matrix().matrix_element(&basis[n.index()], &basis[m.index()])
}

/// Dynamical phases `φ_n` for `(d, μ+, μ-)`, in rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPhases {
    pub dark: f64,
    pub bright_plus: f64,
    pub bright_minus: f64,
}

impl EigenPhases {
    pub fn zero() -> Self {
        Self { dark: 0.0, bright_plus: 0.0, bright_minus: 0.0 }
    }

    /// Phases after resonant dwells of total duration `t` at frequency `omega`.
    pub fn from_dwell(omega: f64, t: f64) -> Self {
        Self { dark: 0.0, bright_plus: omega * t, bright_minus: -omega * t }
    }

    pub fn get(&self, which: Eigenstate) -> f64 {
        match which {
            Eigenstate::Dark => self.dark,
            Eigenstate::BrightPlus => self.bright_plus,
            Eigenstate::BrightMinus => self.bright_minus,
        }
    }
}

/// Ideal adiabatic propagator `Σ_n exp(-iφ_n)|n(θ_T)><n(0)|`.
///
/// Geometric phases are absent: `<n(0)|G|n(0)> = 0` for every eigenstate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticPropagator {
    pub matrix: ComplexMatrix,
    pub phases: EigenPhases,
}

pub fn adiabatic_propagator(theta_t: f64, phases: EigenPhases) -> AdiabaticPropagator {
    let start = eigenbasis(0.0);
    let end = eigenbasis(theta_t);
    let matrix = Eigenstate::ALL.iter().fold(ComplexMatrix::zeros(), |acc, &n| {
        let w = C64::from_polar(1.0, -phases.get(n));
        acc + ComplexMatrix::outer(&end[n.index()], &start[n.index()]).scale(w)
    });
    AdiabaticPropagator { matrix, phases }
}
