//! Time evolution and adiabaticity diagnostics.
//!
//! Two engines: exact piecewise-constant propagation for jump schedules, and a
//! midpoint exponential stepper for the time-dependent STIRAP Hamiltonian.
//! The diabatic correction `U_Dia` of a jump schedule is computed both from the
//! realized propagator and as a discretized path-ordered exponential over θ.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    adiabatic_propagator, eigenbasis, generator_coupling, hamiltonian_jump, EigenPhases, Eigenstate,
    JumpParams, ModelError, LEVEL_0, LEVEL_MINUS1, LEVEL_PLUS1,
};
use crate::schedules::{stirap_matrix, JumpSchedule, ScheduleError, StirapConfig};
use crate::smallmat::{eig_hermitian, expm_unitary, ComplexMatrix, MatrixError, StateVector};
use crate::units;

/// Accepted final-state change between `dt` and `dt/2`.
pub const CONVERGENCE_TOL: f64 = 1e-5;
/// Minimum spectral gap for the adiabaticity metric, rad/µs.
pub const DEGENERACY_GAP: f64 = 1e-6;
/// Allowed deviation of an input state's norm from 1.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagateError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("integrator not converged: |psi(dt) - psi(dt/2)| = {difference:e} > {tolerance:e} with {steps} steps")]
    NonConvergence { difference: f64, tolerance: f64, steps: usize },
    #[error("spectrum degenerate: gap {gap:e} rad/us below {threshold:e}")]
    DegenerateSpectrum { gap: f64, threshold: f64 },
    #[error("initial state not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSample {
    /// Time in µs.
    pub t: f64,
    pub p0: f64,
    pub p_minus1: f64,
    pub p_plus1: f64,
}

impl PopulationSample {
    pub fn from_state(t: f64, psi: &StateVector) -> Self {
        let p = psi.populations();
        Self { t, p0: p[LEVEL_0], p_minus1: p[LEVEL_MINUS1], p_plus1: p[LEVEL_PLUS1] }
    }

    pub fn total(&self) -> f64 {
        self.p0 + self.p_minus1 + self.p_plus1
    }
}

/// Level populations over time plus the run's metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationTrace {
    pub protocol: String,
    pub parameters: BTreeMap<String, f64>,
    pub samples: Vec<PopulationSample>,
}

impl PopulationTrace {
    pub fn new(protocol: impl Into<String>) -> Self {
        Self { protocol: protocol.into(), parameters: BTreeMap::new(), samples: Vec::new() }
    }

    pub fn with_parameter(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    /// Appends a sample; times must be strictly increasing.
    pub fn push(&mut self, sample: PopulationSample) {
        if let Some(last) = self.samples.last() {
            assert!(sample.t > last.t, "trace times must increase: {} after {}", sample.t, last.t);
        }
        self.samples.push(sample);
    }

    pub fn last(&self) -> Option<&PopulationSample> {
        self.samples.last()
    }

    /// Largest `|p0 + p-1 + p+1 - 1|` over the samples.
    pub fn max_norm_defect(&self) -> f64 {
        self.samples.iter().map(|s| (s.total() - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn check_state(psi: &StateVector) -> Result<(), PropagateError> {
    let n = psi.norm();
    if (n - 1.0).abs() > NORM_TOL || !n.is_finite() {
        return Err(PropagateError::NotNormalized(n));
    }
    Ok(())
}

fn segment_hamiltonian(s: &JumpSchedule, theta: f64, delta: f64) -> Result<ComplexMatrix, PropagateError> {
    Ok(hamiltonian_jump(&JumpParams::new(s.omega(), theta, delta)?))
}

/// Total propagator `exp(-iH(θ_N)τ_N) ... exp(-iH(θ_1)τ_1)`.
pub fn piecewise_unitary(s: &JumpSchedule, delta: f64) -> Result<ComplexMatrix, PropagateError> {
    let mut u = ComplexMatrix::identity();
    for seg in s.segments() {
        if seg.duration == 0.0 {
            continue;
        }
        u = expm_unitary(&segment_hamiltonian(s, seg.theta, delta)?, seg.duration)? * u;
    }
    Ok(u)
}

/// Propagates `psi0` through a jump schedule, sampling each segment
/// `samples_per_segment` times. Returns the trace and `U(T)`.
pub fn propagate_piecewise(
    s: &JumpSchedule,
    delta: f64,
    psi0: &StateVector,
    samples_per_segment: usize,
) -> Result<(PopulationTrace, ComplexMatrix), PropagateError> {
    check_state(psi0)?;
    if samples_per_segment == 0 {
        return Err(PropagateError::InvalidArgument("samples_per_segment must be >= 1".into()));
    }
    let mut trace = PopulationTrace::new("jump")
        .with_parameter("n_pulses", s.n_pulses() as f64)
        .with_parameter("omega_mhz", units::rad_per_us_to_mhz(s.omega()))
        .with_parameter("total_time_ns", units::us_to_ns(s.total_time()))
        .with_parameter("delta_mhz", units::rad_per_us_to_mhz(delta));
    trace.push(PopulationSample::from_state(0.0, psi0));

    let mut u = ComplexMatrix::identity();
    let mut t0 = 0.0;
    for seg in s.segments() {
        if seg.duration == 0.0 {
            continue;
        }
        let spectral = eig_hermitian(&segment_hamiltonian(s, seg.theta, delta)?)?;
        let start = u.apply(psi0);
        for i in 1..=samples_per_segment {
            let dt = seg.duration * i as f64 / samples_per_segment as f64;
            let psi = spectral.propagator(dt).apply(&start);
            trace.push(PopulationSample::from_state(t0 + dt, &psi));
        }
        u = spectral.propagator(seg.duration) * u;
        t0 += seg.duration;
    }
    Ok((trace, u))
}

/// Midpoint exponential stepper over `[t_start, t_end]` with `steps` uniform
/// steps. `observe(k, U_k)` sees the accumulated propagator after step `k`.
pub fn evolve_midpoint<F>(
    hamiltonian: F,
    t_start: f64,
    t_end: f64,
    steps: usize,
    mut observe: impl FnMut(usize, &ComplexMatrix),
) -> Result<ComplexMatrix, PropagateError>
where
    F: Fn(f64) -> ComplexMatrix,
{
    if steps == 0 {
        return Err(PropagateError::InvalidArgument("steps must be >= 1".into()));
    }
    let dt = (t_end - t_start) / steps as f64;
    let mut u = ComplexMatrix::identity();
    for k in 0..steps {
        let t_mid = t_start + (k as f64 + 0.5) * dt;
        u = expm_unitary(&hamiltonian(t_mid), dt)? * u;
        observe(k + 1, &u);
    }
    Ok(u)
}

/// STIRAP propagator over `[t_start, t_end]` with a fixed number of steps.
pub fn stirap_unitary(c: &StirapConfig, t_start: f64, t_end: f64, steps: usize) -> Result<ComplexMatrix, PropagateError> {
    c.validate()?;
    evolve_midpoint(|t| stirap_matrix(c, t), t_start, t_end, steps, |_, _| {})
}

/// Time-dependent propagation of the STIRAP Hamiltonian.
///
/// Runs at the configured step and at half of it; fails with
/// [`PropagateError::NonConvergence`] if the final states differ by more than
/// [`CONVERGENCE_TOL`]. The returned trace and unitary come from the finer run.
pub fn propagate_timedep(
    c: &StirapConfig,
    psi0: &StateVector,
    n_samples: usize,
) -> Result<(PopulationTrace, ComplexMatrix), PropagateError> {
    c.validate()?;
    check_state(psi0)?;
    if n_samples == 0 {
        return Err(PropagateError::InvalidArgument("n_samples must be >= 1".into()));
    }
    let coarse_steps = c.steps();
    let coarse = stirap_unitary(c, 0.0, c.total_time, coarse_steps)?;

    let steps = 2 * coarse_steps;
    let dt = c.total_time / steps as f64;
    let mut trace = PopulationTrace::new("stirap")
        .with_parameter("omega_mhz", units::rad_per_us_to_mhz(c.omega))
        .with_parameter("total_time_ns", units::us_to_ns(c.total_time))
        .with_parameter("delay_ns", units::us_to_ns(c.delay))
        .with_parameter("width_ns", units::us_to_ns(c.width))
        .with_parameter("delta_mhz", units::rad_per_us_to_mhz(c.detuning))
        .with_parameter("dt_ns", units::us_to_ns(dt));
    trace.push(PopulationSample::from_state(0.0, psi0));
    let mut next_sample = 1;
    let fine = evolve_midpoint(|t| stirap_matrix(c, t), 0.0, c.total_time, steps, |k, u| {
        // sample k is due at step round(k * steps / n_samples)
        while next_sample <= n_samples && (next_sample * steps + n_samples / 2) / n_samples <= k {
            if (next_sample * steps + n_samples / 2) / n_samples == k {
                let t = if k == steps { c.total_time } else { k as f64 * dt };
                if trace.last().is_none_or(|s| t > s.t) {
                    trace.push(PopulationSample::from_state(t, &u.apply(psi0)));
                }
            }
            next_sample += 1;
        }
    })?;

    let difference = coarse.apply(psi0).distance(&fine.apply(psi0));
    if difference > CONVERGENCE_TOL {
        return Err(PropagateError::NonConvergence { difference, tolerance: CONVERGENCE_TOL, steps: coarse_steps });
    }
    Ok((trace, fine))
}

/// Decomposition `U(T) = U_adia · U_Dia` of a realized jump evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiabaticAnalysis {
    pub u_total: ComplexMatrix,
    pub u_adia: ComplexMatrix,
    pub u_dia: ComplexMatrix,
    /// `max|U_Dia - I|`.
    pub deviation: f64,
}

/// Endpoint of every jump path, `θ_T = π/2`.
pub const THETA_FINAL: f64 = FRAC_PI_2;

/// `U_Dia = U_adia^dagger U(T)`, with `U_adia` carrying the dynamical phases
/// `(0, +Ωτ_total, -Ωτ_total)` actually accumulated by the schedule.
pub fn diabatic_correction(s: &JumpSchedule) -> Result<DiabaticAnalysis, PropagateError> {
    let u_total = piecewise_unitary(s, 0.0)?;
    let phases = EigenPhases::from_dwell(s.omega(), s.total_time());
    let u_adia = adiabatic_propagator(THETA_FINAL, phases).matrix;
    let u_dia = u_adia.adjoint() * u_total;
    let deviation = u_dia.max_diff(&ComplexMatrix::identity());
    Ok(DiabaticAnalysis { u_total, u_adia, u_dia, deviation })
}

/// `X(θ) = Σ_{n,m} exp(i[φ_n - φ_m]) <n(0)|G|m(0)> |n(0)><m(0)|` for the given phases.
pub fn nonadiabatic_generator(phases: &EigenPhases) -> ComplexMatrix {
    let basis = eigenbasis(0.0);
    let mut x = ComplexMatrix::zeros();
    for n in Eigenstate::ALL {
        for m in Eigenstate::ALL {
            let g = generator_coupling(n, m);
            if g.norm() == 0.0 {
                continue;
            }
            let xi = C64::from_polar(1.0, phases.get(n) - phases.get(m));
            x = x + ComplexMatrix::outer(&basis[n.index()], &basis[m.index()]).scale(xi * g);
        }
    }
    x
}

/// `U_Dia` as the path-ordered exponential `P exp(i ∫_0^{π/2} X(θ) dθ)`.
///
/// `[0, π/2]` is cut into `n_grid` equal cells; `X` is evaluated at each cell
/// midpoint with the dynamical phases of all dwells at `θ_j <= θ`, and the
/// cell exponentials are multiplied with larger θ on the left. Because the
/// jumps are instantaneous the phases are step functions of θ; for the exact
/// protocol `exp(i[φ_d - φ_μ±]) = F(θ)`.
pub fn diabatic_correction_pathordered(s: &JumpSchedule, n_grid: usize) -> Result<ComplexMatrix, PropagateError> {
    if n_grid < 100 {
        return Err(PropagateError::InvalidArgument(format!("n_grid must be >= 100, got {n_grid}")));
    }
    let segs = s.segments();
    if segs.windows(2).any(|w| w[1].theta < w[0].theta)
        || segs.iter().any(|g| g.theta < 0.0 || g.theta > THETA_FINAL)
    {
        return Err(PropagateError::InvalidArgument(
            "path-ordered evaluation needs nondecreasing jump points in [0, pi/2]".into(),
        ));
    }

    let dtheta = THETA_FINAL / n_grid as f64;
    let mut u = ComplexMatrix::identity();
    let mut cached: Option<(usize, ComplexMatrix)> = None;
    let mut dwell_count = 0;
    let mut dwell_time = 0.0;
    for k in 0..n_grid {
        let theta = (k as f64 + 0.5) * dtheta;
        while dwell_count < segs.len() && segs[dwell_count].theta <= theta {
            dwell_time += segs[dwell_count].duration;
            dwell_count += 1;
        }
        let step = match cached {
            Some((count, m)) if count == dwell_count => m,
            _ => {
                let x = nonadiabatic_generator(&EigenPhases::from_dwell(s.omega(), dwell_time));
                // exp(i X dθ) = exp(-i X (-dθ))
                let m = expm_unitary(&x, -dtheta)?;
                cached = Some((dwell_count, m));
                m
            }
        };
        u = step * u;
    }
    Ok(u)
}

/// Pairwise adiabaticity ratios `|<φ_m|dH/dt|φ_n>| / (E_n - E_m)^2`.
///
/// `dH/dt` comes from central differences with step `dt_fd`. Entry `[m][n]`
/// uses eigenstates sorted by ascending energy; the diagonal is zero.
pub fn adiabaticity_metric<F, E>(hamiltonian: F, t: f64, dt_fd: f64) -> Result<[[f64; 3]; 3], PropagateError>
where
    F: Fn(f64) -> Result<ComplexMatrix, E>,
    PropagateError: From<E>,
{
    if !(dt_fd > 0.0 && dt_fd.is_finite()) {
        return Err(PropagateError::InvalidArgument(format!("dt_fd must be positive, got {dt_fd}")));
    }
    let h = hamiltonian(t)?;
    let spectral = eig_hermitian(&h)?;
    let e = spectral.eigenvalues;
    let gap = e.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap < DEGENERACY_GAP {
        return Err(PropagateError::DegenerateSpectrum { gap, threshold: DEGENERACY_GAP });
    }
    let hdot = (hamiltonian(t + dt_fd)? - hamiltonian(t - dt_fd)?).scale_real(0.5 / dt_fd);
    let v = spectral.eigenvectors;
    let mut out = [[0.0; 3]; 3];
    for m in 0..3 {
        for n in 0..3 {
            if m != n {
                out[m][n] = hdot.matrix_element(&v[m], &v[n]).norm() / (e[n] - e[m]).powi(2);
            }
        }
    }
    Ok(out)
}
