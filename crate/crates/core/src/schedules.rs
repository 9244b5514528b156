//! Pulse schedules for the jump protocol and the Gaussian STIRAP baseline.
//!
//! Internal units: time in µs, angular frequency in rad/µs. The JSON dump
//! uses ns and MHz (quantity/2π).

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{LEVEL_0, LEVEL_MINUS1, LEVEL_PLUS1};
use crate::smallmat::ComplexMatrix;
use crate::units;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("pulse count must be at least 1, got {0}")]
    InvalidPulseCount(usize),
    #[error("invalid {name}: {value} ({reason})")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("time {t} µs outside [0, {total}] µs")]
    TimeOutOfRange { t: f64, total: f64 },
}

fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), ScheduleError> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(ScheduleError::InvalidParameter { name, value, reason })
    }
}

/// One dwell of the jump protocol: `H(theta)` applied for `duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub theta: f64,
    pub duration: f64,
}

/// Piecewise-constant jump schedule from `θ = 0` to `θ = π/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpSchedule {
    segments: Vec<Segment>,
    omega: f64,
}

/// Jump points `θ_j = (2j - 1)π / 4N`, `j = 1..=N`.
pub fn jump_angles(n_pulses: usize) -> Result<Vec<f64>, ScheduleError> {
    if n_pulses == 0 {
        return Err(ScheduleError::InvalidPulseCount(0));
    }
    let n = n_pulses as f64;
    Ok((1..=n_pulses).map(|j| (2 * j - 1) as f64 * PI / (4.0 * n)).collect())
}

/// The exact protocol: `N` dwells of `τ = π/Ω` at the jump points.
pub fn make_jump_schedule(n_pulses: usize, omega: f64) -> Result<JumpSchedule, ScheduleError> {
    let thetas = jump_angles(n_pulses)?;
    check("omega", omega, omega > 0.0, "must be positive")?;
    let tau = PI / omega;
    let segments = thetas.into_iter().map(|theta| Segment { theta, duration: tau }).collect();
    Ok(JumpSchedule { segments, omega })
}

/// Same jump points, each dwell lasting `total_time / N`.
///
/// Only `total_time = Nπ/Ω` reproduces the exact protocol; other values are
/// what the time sweeps scan over.
pub fn stretch_schedule(s: &JumpSchedule, total_time: f64) -> Result<JumpSchedule, ScheduleError> {
    check("total_time", total_time, total_time >= 0.0, "must be nonnegative")?;
    let dwell = total_time / s.n_pulses() as f64;
    let segments = s.segments.iter().map(|seg| Segment { theta: seg.theta, duration: dwell }).collect();
    Ok(JumpSchedule { segments, omega: s.omega })
}

impl JumpSchedule {
    /// Arbitrary schedule, e.g. perturbed jump points or dwell times.
    pub fn from_segments(omega: f64, segments: Vec<Segment>) -> Result<Self, ScheduleError> {
        if segments.is_empty() {
            return Err(ScheduleError::InvalidPulseCount(0));
        }
        check("omega", omega, omega > 0.0, "must be positive")?;
        for seg in &segments {
            check("theta", seg.theta, true, "must be finite")?;
            check("duration", seg.duration, seg.duration >= 0.0, "must be nonnegative")?;
        }
        Ok(Self { segments, omega })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n_pulses(&self) -> usize {
        self.segments.len()
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn sign_function(&self) -> SignFunction {
        SignFunction { breakpoints: self.segments.iter().map(|s| s.theta).collect() }
    }

    /// Start time of each segment.
    pub fn segment_starts(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = t;
                t += s.duration;
                start
            })
            .collect()
    }
}

/// `F(θ) = (-1)^j` on `[θ_j, θ_{j+1})`, with `θ_0 = 0` and `θ_{N+1} = π/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignFunction {
    breakpoints: Vec<f64>,
}

impl SignFunction {
    pub fn jumps_before(&self, theta: f64) -> usize {
        self.breakpoints.iter().filter(|&&b| b <= theta).count()
    }

    pub fn value(&self, theta: f64) -> f64 {
        if self.jumps_before(theta).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `∫_0^{π/2} F(θ) dθ`, summed exactly over the piecewise-constant intervals.
    pub fn integral(&self) -> f64 {
        let mut edges = vec![0.0];
        edges.extend(self.breakpoints.iter().copied());
        edges.push(FRAC_PI_2);
        edges
            .windows(2)
            .enumerate()
            .map(|(j, w)| if j % 2 == 0 { w[1] - w[0] } else { w[0] - w[1] })
            .sum()
    }
}

/// Gaussian STIRAP configuration. Peak envelope is `2Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirapConfig {
    pub omega: f64,
    pub total_time: f64,
    pub delay: f64,
    pub width: f64,
    pub detuning: f64,
    pub dt: f64,
}

/// Default integrator steps per protocol duration.
pub const STIRAP_DEFAULT_STEPS: usize = 2000;
/// Coarsest accepted step, as a fraction of the protocol duration.
pub const STIRAP_MIN_STEPS: usize = 500;

impl StirapConfig {
    /// Defaults: `Δt = T/10`, `σ = T/6`, `dt = T/2000`, resonant.
    pub fn new(omega: f64, total_time: f64) -> Result<Self, ScheduleError> {
        let c = Self {
            omega,
            total_time,
            delay: total_time / 10.0,
            width: total_time / 6.0,
            detuning: 0.0,
            dt: total_time / STIRAP_DEFAULT_STEPS as f64,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_detuning(mut self, detuning: f64) -> Result<Self, ScheduleError> {
        self.detuning = detuning;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self, ScheduleError> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn with_pulse_shape(mut self, delay: f64, width: f64) -> Result<Self, ScheduleError> {
        self.delay = delay;
        self.width = width;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        check("omega", self.omega, self.omega >= 0.0, "must be nonnegative")?;
        check("total_time", self.total_time, self.total_time > 0.0, "must be positive")?;
        check("delay", self.delay, true, "must be finite")?;
        check("width", self.width, self.width > 0.0, "must be positive")?;
        check("detuning", self.detuning, true, "must be finite")?;
        let max_dt = self.total_time / STIRAP_MIN_STEPS as f64;
        check("dt", self.dt, self.dt > 0.0 && self.dt <= max_dt * (1.0 + 1e-12), "must be in (0, T/500]")?;
        Ok(())
    }

    /// Number of uniform steps covering `[0, T]` with step at most `dt`.
    pub fn steps(&self) -> usize {
        let n = (self.total_time / self.dt * (1.0 - 1e-12)).ceil();
        n.max(1.0) as usize
    }
}

fn check_time(c: &StirapConfig, t: f64) -> Result<(), ScheduleError> {
    let slack = 1e-12 * c.total_time;
    if t.is_finite() && t >= -slack && t <= c.total_time + slack {
        Ok(())
    } else {
        Err(ScheduleError::TimeOutOfRange { t, total: c.total_time })
    }
}

/// `(Ω_P(t), Ω_S(t))`; the Stokes pulse peaks first at `T/2 - Δt`.
pub fn stirap_envelopes(c: &StirapConfig, t: f64) -> Result<(f64, f64), ScheduleError> {
    check_time(c, t)?;
    Ok(envelopes_unchecked(c, t))
}

pub(crate) fn envelopes_unchecked(c: &StirapConfig, t: f64) -> (f64, f64) {
    let mid = c.total_time / 2.0;
    let peak = 2.0 * c.omega;
    let sig2 = c.width * c.width;
    let stokes = peak * (-(t - mid + c.delay).powi(2) / sig2).exp();
    let pump = peak * (-(t - mid - c.delay).powi(2) / sig2).exp();
    (pump, stokes)
}

/// `(1/2)[[0, Ω_P, Ω_S], [Ω_P, 0, 0], [Ω_S, 0, 0]] + diag(0, Δ, -Δ)`.
pub fn hamiltonian_stirap(c: &StirapConfig, t: f64) -> Result<ComplexMatrix, ScheduleError> {
    check_time(c, t)?;
    Ok(stirap_matrix(c, t))
}

pub(crate) fn stirap_matrix(c: &StirapConfig, t: f64) -> ComplexMatrix {
    let (pump, stokes) = envelopes_unchecked(c, t);
    let mut h = ComplexMatrix::zeros();
    h[(LEVEL_0, LEVEL_MINUS1)] = C64::new(0.5 * pump, 0.0);
    h[(LEVEL_MINUS1, LEVEL_0)] = C64::new(0.5 * pump, 0.0);
    h[(LEVEL_0, LEVEL_PLUS1)] = C64::new(0.5 * stokes, 0.0);
    h[(LEVEL_PLUS1, LEVEL_0)] = C64::new(0.5 * stokes, 0.0);
    h[(LEVEL_MINUS1, LEVEL_MINUS1)] = C64::new(c.detuning, 0.0);
    h[(LEVEL_PLUS1, LEVEL_PLUS1)] = C64::new(-c.detuning, 0.0);
    h
}

/// JSON form of a schedule, in ns and MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum ScheduleDump {
    Jump {
        n_pulses: usize,
        omega_mhz: f64,
        total_time_ns: f64,
        segments: Vec<SegmentDump>,
    },
    Stirap {
        omega_mhz: f64,
        peak_mhz: f64,
        total_time_ns: f64,
        delay_ns: f64,
        width_ns: f64,
        detuning_mhz: f64,
        dt_ns: f64,
        steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDump {
    pub theta_rad: f64,
    pub start_ns: f64,
    pub duration_ns: f64,
    pub omega_minus_mhz: f64,
    pub omega_plus_mhz: f64,
}

impl From<&JumpSchedule> for ScheduleDump {
    fn from(s: &JumpSchedule) -> Self {
        let omega_mhz = units::rad_per_us_to_mhz(s.omega);
        let segments = s
            .segments
            .iter()
            .zip(s.segment_starts())
            .map(|(seg, start)| SegmentDump {
                theta_rad: seg.theta,
                start_ns: units::us_to_ns(start),
                duration_ns: units::us_to_ns(seg.duration),
                omega_minus_mhz: 2.0 * omega_mhz * seg.theta.sin(),
                omega_plus_mhz: 2.0 * omega_mhz * seg.theta.cos(),
            })
            .collect();
        ScheduleDump::Jump {
            n_pulses: s.n_pulses(),
            omega_mhz,
            total_time_ns: units::us_to_ns(s.total_time()),
            segments,
        }
    }
}

impl From<&StirapConfig> for ScheduleDump {
    fn from(c: &StirapConfig) -> Self {
        let omega_mhz = units::rad_per_us_to_mhz(c.omega);
        ScheduleDump::Stirap {
            omega_mhz,
            peak_mhz: 2.0 * omega_mhz,
            total_time_ns: units::us_to_ns(c.total_time),
            delay_ns: units::us_to_ns(c.delay),
            width_ns: units::us_to_ns(c.width),
            detuning_mhz: units::rad_per_us_to_mhz(c.detuning),
            dt_ns: units::us_to_ns(c.total_time / c.steps() as f64),
            steps: c.steps(),
        }
    }
}
