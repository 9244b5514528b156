//! Parameter sweeps and protocol comparisons.
//!
//! Scan values are stored in user-facing units (ns for times, MHz for
//! detunings) so results serialize without conversion.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{LEVEL_0, LEVEL_MINUS1, LEVEL_PLUS1};
use crate::propagate::{
    piecewise_unitary, propagate_timedep, PopulationSample, PopulationTrace, PropagateError,
};
use crate::schedules::{make_jump_schedule, stretch_schedule, StirapConfig};
use crate::smallmat::{expm_unitary, ComplexMatrix, StateVector};
use crate::units;

/// Default number of grid points for sweeps.
pub const DEFAULT_SWEEP_POINTS: usize = 101;

/// A fully specified transfer protocol acting on the three-level system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum Protocol {
    Identity,
    /// `n_pulses` dwells of `total_time / n_pulses` each. Units: rad/µs, µs.
    Jump { n_pulses: usize, omega: f64, total_time: f64, delta: f64 },
    Stirap(StirapConfig),
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Identity => "identity",
            Protocol::Jump { .. } => "jump",
            Protocol::Stirap(_) => "stirap",
        }
    }

    /// Same protocol under a different detuning (rad/µs).
    pub fn with_detuning(&self, delta: f64) -> Result<Self, PropagateError> {
        Ok(match *self {
            Protocol::Identity => Protocol::Identity,
            Protocol::Jump { n_pulses, omega, total_time, .. } => {
                Protocol::Jump { n_pulses, omega, total_time, delta }
            }
            Protocol::Stirap(c) => Protocol::Stirap(c.with_detuning(delta)?),
        })
    }

    /// Total propagator of the protocol.
    pub fn unitary(&self) -> Result<ComplexMatrix, PropagateError> {
        match *self {
            Protocol::Identity => Ok(ComplexMatrix::identity()),
            Protocol::Jump { n_pulses, omega, total_time, delta } => {
                let s = stretch_schedule(&make_jump_schedule(n_pulses, omega)?, total_time)?;
                piecewise_unitary(&s, delta)
            }
            Protocol::Stirap(c) => Ok(propagate_timedep(&c, &StateVector::basis(LEVEL_MINUS1), 1)?.1),
        }
    }

    /// Population of `|+1>` at the end, starting from `|-1>`.
    pub fn efficiency(&self) -> Result<f64, PropagateError> {
        Ok(self.unitary()?.apply(&StateVector::basis(LEVEL_MINUS1)).populations()[LEVEL_PLUS1])
    }
}

/// `P_{+1}(T)` from `|-1>` for the jump protocol with dwells of `T/N`.
pub fn transfer_efficiency_jump(n_pulses: usize, omega: f64, total_time: f64, delta: f64) -> Result<f64, PropagateError> {
    Protocol::Jump { n_pulses, omega, total_time, delta }.efficiency()
}

/// `P_{+1}(T)` from `|-1>` for Gaussian STIRAP.
pub fn transfer_efficiency_stirap(c: &StirapConfig) -> Result<f64, PropagateError> {
    Protocol::Stirap(*c).efficiency()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub value: f64,
    pub efficiency: f64,
}

/// Efficiency as a function of one swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub parameter: String,
    pub unit: String,
    pub protocol: String,
    pub metadata: BTreeMap<String, f64>,
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    pub fn new(parameter: &str, unit: &str, protocol: &str) -> Self {
        Self {
            parameter: parameter.into(),
            unit: unit.into(),
            protocol: protocol.into(),
            metadata: BTreeMap::new(),
            points: Vec::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: f64) -> Self {
        self.metadata.insert(key.into(), value);
        self
    }

    /// Points are sorted by value; efficiencies clipped by nothing.
    pub fn from_unsorted(mut self, mut points: Vec<ScanPoint>) -> Self {
        points.sort_by(|a, b| a.value.total_cmp(&b.value));
        self.points = points;
        self
    }

    pub fn efficiency_at(&self, value: f64) -> Option<f64> {
        self.points.iter().find(|p| p.value == value).map(|p| p.efficiency)
    }

    /// Total length of the swept axis over which efficiency exceeds `threshold`,
    /// with crossings located by linear interpolation between grid points.
    pub fn width_above(&self, threshold: f64) -> f64 {
        let mut width = 0.0;
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let span = b.value - a.value;
            match (a.efficiency > threshold, b.efficiency > threshold) {
                (true, true) => width += span,
                (true, false) => width += span * (a.efficiency - threshold) / (a.efficiency - b.efficiency),
                (false, true) => width += span * (b.efficiency - threshold) / (b.efficiency - a.efficiency),
                (false, false) => {}
            }
        }
        width
    }
}

/// Uniform grid with `points` values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|k| {
                if k == points - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// Result of [`sweep_time_jump`]: efficiency per total time, and the end-of-protocol
/// populations of all three levels with the total time as the time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSweep {
    pub scan: ScanResult,
    pub endpoints: PopulationTrace,
}

/// Jump protocol at each total time in `times` (µs), each dwell `T/N`.
pub fn sweep_time_jump(n_pulses: usize, omega: f64, times: &[f64]) -> Result<TimeSweep, PropagateError> {
    if times.is_empty() {
        return Err(PropagateError::InvalidArgument("time list must not be empty".into()));
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let base = make_jump_schedule(n_pulses, omega)?;
    let finals: Vec<StateVector> = sorted
        .par_iter()
        .map(|&t| -> Result<StateVector, PropagateError> {
            let s = stretch_schedule(&base, t)?;
            Ok(piecewise_unitary(&s, 0.0)?.apply(&StateVector::basis(LEVEL_MINUS1)))
        })
        .collect::<Result<_, _>>()?;

    let mut endpoints = PopulationTrace::new("jump")
        .with_parameter("n_pulses", n_pulses as f64)
        .with_parameter("omega_mhz", units::rad_per_us_to_mhz(omega));
    let mut points = Vec::with_capacity(sorted.len());
    for (&t, psi) in sorted.iter().zip(&finals) {
        endpoints.push(PopulationSample::from_state(t, psi));
        points.push(ScanPoint { value: units::us_to_ns(t), efficiency: psi.populations()[LEVEL_PLUS1] });
    }
    let scan = ScanResult::new("total_time", "ns", "jump")
        .with_metadata("n_pulses", n_pulses as f64)
        .with_metadata("omega_mhz", units::rad_per_us_to_mhz(omega))
        .from_unsorted(points);
    Ok(TimeSweep { scan, endpoints })
}

/// Protocol family for the detuning scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Jump { n_pulses: usize },
    Stirap,
}

impl ProtocolKind {
    /// Resonant protocol of total time `total_time` (µs) at Rabi parameter `omega`.
    pub fn build(&self, omega: f64, total_time: f64) -> Result<Protocol, PropagateError> {
        Ok(match *self {
            ProtocolKind::Jump { n_pulses } => Protocol::Jump { n_pulses, omega, total_time, delta: 0.0 },
            ProtocolKind::Stirap => Protocol::Stirap(StirapConfig::new(omega, total_time)?),
        })
    }
}

/// Efficiency vs. detuning (`deltas` in rad/µs; stored in MHz).
pub fn scan_detuning(kind: ProtocolKind, omega: f64, total_time: f64, deltas: &[f64]) -> Result<ScanResult, PropagateError> {
    scan_detuning_protocol(&kind.build(omega, total_time)?, deltas)
}

/// Efficiency vs. detuning for an arbitrary base protocol.
pub fn scan_detuning_protocol(base: &Protocol, deltas: &[f64]) -> Result<ScanResult, PropagateError> {
    let points: Vec<ScanPoint> = deltas
        .par_iter()
        .map(|&d| -> Result<ScanPoint, PropagateError> {
            let efficiency = base.with_detuning(d)?.efficiency()?;
            Ok(ScanPoint { value: units::rad_per_us_to_mhz(d), efficiency })
        })
        .collect::<Result<_, _>>()?;
    let mut scan = ScanResult::new("delta", "MHz", base.name());
    match base {
        Protocol::Jump { n_pulses, omega, total_time, .. } => {
            scan = scan
                .with_metadata("n_pulses", *n_pulses as f64)
                .with_metadata("omega_mhz", units::rad_per_us_to_mhz(*omega))
                .with_metadata("total_time_ns", units::us_to_ns(*total_time));
        }
        Protocol::Stirap(c) => {
            scan = scan
                .with_metadata("omega_mhz", units::rad_per_us_to_mhz(c.omega))
                .with_metadata("total_time_ns", units::us_to_ns(c.total_time));
        }
        Protocol::Identity => {}
    }
    Ok(scan.from_unsorted(points))
}

/// How the `|0> <-> |-1>` π pulses of the readout sequence are modeled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PiPulse {
    /// Instantaneous population swap.
    Ideal,
    /// Resonant pulse `H = (Ω_π/2)(|0><-1| + h.c.)` for `π/Ω_π`. Rabi frequency in rad/µs.
    Finite { rabi: f64 },
}

impl PiPulse {
    pub fn unitary(&self) -> Result<ComplexMatrix, PropagateError> {
        match *self {
            PiPulse::Ideal => {
                let mut u = ComplexMatrix::zeros();
                u[(LEVEL_0, LEVEL_MINUS1)] = 1.0.into();
                u[(LEVEL_MINUS1, LEVEL_0)] = 1.0.into();
                u[(LEVEL_PLUS1, LEVEL_PLUS1)] = 1.0.into();
                Ok(u)
            }
            PiPulse::Finite { rabi } => {
                if !(rabi > 0.0 && rabi.is_finite()) {
                    return Err(PropagateError::InvalidArgument(format!("pi-pulse Rabi frequency must be positive, got {rabi}")));
                }
                let mut h = ComplexMatrix::zeros();
                h[(LEVEL_0, LEVEL_MINUS1)] = (0.5 * rabi).into();
                h[(LEVEL_MINUS1, LEVEL_0)] = (0.5 * rabi).into();
                Ok(expm_unitary(&h, std::f64::consts::PI / rabi)?)
            }
        }
    }
}

/// Populations read out by the two-part sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutEmulation {
    /// `P_0` after init π pulse and protocol.
    pub part1_p0: f64,
    /// `P_0` after an extra π pulse, i.e. the protocol's `P_{-1}`.
    pub part2_p0: f64,
    /// `(p0, p_minus1, p_plus1)` with `p_plus1 = 1 - part1 - part2`.
    pub inferred: (f64, f64, f64),
}

/// Emulates the laser-init → π → protocol → (π) → readout sequence.
pub fn emulate_readout_sequence(protocol: &Protocol, pi: PiPulse) -> Result<ReadoutEmulation, PropagateError> {
    let flip = pi.unitary()?;
    let u = protocol.unitary()?;
    let after = (u * flip).apply(&StateVector::basis(LEVEL_0));
    let part1_p0 = after.populations()[LEVEL_0];
    let part2_p0 = flip.apply(&after).populations()[LEVEL_0];
    Ok(ReadoutEmulation { part1_p0, part2_p0, inferred: (part1_p0, part2_p0, 1.0 - part1_p0 - part2_p0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseEstimate {
    pub mean: f64,
    /// Sample standard deviation (zero for a single sample).
    pub std_dev: f64,
    pub n_samples: usize,
}

/// Efficiency averaged over a static detuning `Δ ~ N(0, sigma_delta²)` (rad/µs).
///
/// Detunings are drawn sequentially from a seeded ChaCha stream before the
/// parallel evaluation, so the result depends only on the seed.
pub fn monte_carlo_static_noise(
    protocol: &Protocol,
    sigma_delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<NoiseEstimate, PropagateError> {
    if n_samples == 0 {
        return Err(PropagateError::InvalidArgument("n_samples must be >= 1".into()));
    }
    if !(sigma_delta >= 0.0 && sigma_delta.is_finite()) {
        return Err(PropagateError::InvalidArgument(format!("sigma_delta must be nonnegative, got {sigma_delta}")));
    }
    let normal = Normal::new(0.0, sigma_delta)
        .map_err(|e| PropagateError::InvalidArgument(format!("sigma_delta: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deltas: Vec<f64> = (0..n_samples).map(|_| normal.sample(&mut rng)).collect();
    let effs: Vec<f64> = deltas
        .par_iter()
        .map(|&d| protocol.with_detuning(d)?.efficiency())
        .collect::<Result<_, _>>()?;
    let n = effs.len() as f64;
    let mean = effs.iter().sum::<f64>() / n;
    let std_dev = if effs.len() > 1 {
        (effs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(NoiseEstimate { mean, std_dev, n_samples })
}
