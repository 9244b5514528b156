//! Run configuration: JSON file merged with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use geojump::io::OutputFormat;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolName {
    Jump,
    Stirap,
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolName::Jump => "jump",
            ProtocolName::Stirap => "stirap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    /// Total time, ns.
    Time,
    /// Detuning Δ/2π, MHz.
    Delta,
    /// Pulse count (jump only).
    N,
}

impl SweepParameter {
    pub fn unit(self) -> &'static str {
        match self {
            SweepParameter::Time => "ns",
            SweepParameter::Delta => "MHz",
            SweepParameter::N => "",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::Time => "time_ns",
            SweepParameter::Delta => "delta_mhz",
            SweepParameter::N => "n_pulses",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl FromStr for SweepSpec {
    type Err = String;

    /// `param:start:stop:points`, e.g. `delta:-2:2:101`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [param, start, stop, points] = parts[..] else {
            return Err(format!("expected param:start:stop:points, got `{s}`"));
        };
        let parameter = match param {
            "time" => SweepParameter::Time,
            "delta" => SweepParameter::Delta,
            "n" => SweepParameter::N,
            other => return Err(format!("unknown sweep parameter `{other}` (expected time, delta or n)")),
        };
        let num = |v: &str| v.parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
        Ok(SweepSpec {
            parameter,
            start: num(start)?,
            stop: num(stop)?,
            points: points.parse().map_err(|e| format!("`{points}`: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// Config file contents. Every field is optional; flags fill or override.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: Option<ProtocolName>,
    pub omega_mhz: Option<f64>,
    pub n_pulses: Option<usize>,
    pub total_time_ns: Option<f64>,
    pub delta_mhz: Option<f64>,
    pub dt_ns: Option<f64>,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    pub seed: Option<u64>,
    pub sigma_delta_mhz: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug)]
pub struct ValidationError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

fn invalid(field: &'static str, message: impl Into<String>) -> ValidationError {
    ValidationError { field, message: message.into() }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ValidationError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            invalid("config", format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()))
        })
    }

    /// `other` wins wherever it is set.
    pub fn overridden_by(self, other: RunConfig) -> RunConfig {
        RunConfig {
            protocol: other.protocol.or(self.protocol),
            omega_mhz: other.omega_mhz.or(self.omega_mhz),
            n_pulses: other.n_pulses.or(self.n_pulses),
            total_time_ns: other.total_time_ns.or(self.total_time_ns),
            delta_mhz: other.delta_mhz.or(self.delta_mhz),
            dt_ns: other.dt_ns.or(self.dt_ns),
            sweep: other.sweep.or(self.sweep),
            output: OutputSpec {
                path: other.output.path.or(self.output.path),
                format: other.output.format.or(self.output.format),
            },
            seed: other.seed.or(self.seed),
            sigma_delta_mhz: other.sigma_delta_mhz.or(self.sigma_delta_mhz),
            samples: other.samples.or(self.samples),
        }
    }

    pub fn validate(&self) -> Result<Validated, ValidationError> {
        let protocol = self.protocol.ok_or_else(|| invalid("protocol", "required (jump or stirap)"))?;
        let omega_mhz = self.omega_mhz.ok_or_else(|| invalid("omega_mhz", "required"))?;
        positive("omega_mhz", omega_mhz)?;
        let delta_mhz = self.delta_mhz.unwrap_or(0.0);
        if !delta_mhz.is_finite() {
            return Err(invalid("delta_mhz", format!("must be finite, got {delta_mhz}")));
        }

        let sweep = self.sweep;
        if let Some(sw) = sweep {
            if sw.points == 0 {
                return Err(invalid("sweep.points", "must be >= 1"));
            }
            if !(sw.start.is_finite() && sw.stop.is_finite()) {
                return Err(invalid("sweep", "start and stop must be finite"));
            }
            match sw.parameter {
                SweepParameter::Time if sw.start.min(sw.stop) < 0.0 => {
                    return Err(invalid("sweep", "time values must be nonnegative"));
                }
                SweepParameter::N => {
                    if protocol != ProtocolName::Jump {
                        return Err(invalid("sweep.parameter", "n sweeps require protocol jump"));
                    }
                    if sw.start.min(sw.stop) < 1.0 || sw.start.fract() != 0.0 || sw.stop.fract() != 0.0 {
                        return Err(invalid("sweep", "n values must be integers >= 1"));
                    }
                }
                _ => {}
            }
        }
        let swept = |p| sweep.is_some_and(|s| s.parameter == p);

        let n_pulses = match protocol {
            ProtocolName::Jump if !swept(SweepParameter::N) => {
                let n = self.n_pulses.ok_or_else(|| invalid("n_pulses", "required for protocol jump"))?;
                if n == 0 {
                    return Err(invalid("n_pulses", "must be >= 1, got 0"));
                }
                Some(n)
            }
            _ => self.n_pulses,
        };

        let total_time_ns = match self.total_time_ns {
            Some(t) => {
                positive("total_time_ns", t)?;
                Some(t)
            }
            None if swept(SweepParameter::Time) => None,
            // exact dwell π/Ω per pulse for each swept N
            None if swept(SweepParameter::N) => None,
            None => return Err(invalid("total_time_ns", "required")),
        };

        if let Some(dt) = self.dt_ns {
            positive("dt_ns", dt)?;
            if protocol == ProtocolName::Jump {
                return Err(invalid("dt_ns", "only applies to protocol stirap"));
            }
        }

        let noise = match (self.sigma_delta_mhz, self.samples) {
            (None, None) => None,
            (Some(sigma), samples) => {
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(invalid("sigma_delta_mhz", format!("must be nonnegative, got {sigma}")));
                }
                let samples = samples.unwrap_or(1000);
                if samples == 0 {
                    return Err(invalid("samples", "must be >= 1"));
                }
                if sweep.is_some() {
                    return Err(invalid("sigma_delta_mhz", "cannot be combined with a sweep"));
                }
                Some(Noise { sigma_mhz: sigma, samples, seed: self.seed.unwrap_or(0) })
            }
            (None, Some(_)) => return Err(invalid("samples", "requires sigma_delta_mhz")),
        };

        Ok(Validated {
            protocol,
            omega_mhz,
            n_pulses,
            total_time_ns,
            delta_mhz,
            dt_ns: self.dt_ns,
            sweep,
            noise,
            out: self.output.path.clone(),
            format: self.output.format.unwrap_or(OutputFormat::Csv),
        })
    }
}

fn positive(field: &'static str, v: f64) -> Result<(), ValidationError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub sigma_mhz: f64,
    pub samples: usize,
    pub seed: u64,
}

/// A checked configuration. Quantities are still in ns and MHz.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub protocol: ProtocolName,
    pub omega_mhz: f64,
    pub n_pulses: Option<usize>,
    pub total_time_ns: Option<f64>,
    pub delta_mhz: f64,
    pub dt_ns: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub noise: Option<Noise>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}
