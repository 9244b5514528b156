//! Regenerates the data behind each figure panel as CSV files.
//!
//! | file | content |
//! |------|---------|
//! | `fig2a..fig2d.csv` | jump end populations vs. T, N = 1..4, T up to N·125 ns |
//! | `fig3a_n1..n4.csv` | jump efficiency vs. T for N = 1..4 |
//! | `fig3b_t500/t1200/t1800.csv` | STIRAP population dynamics for T = 500, 1200, 1800 ns |
//! | `fig4a.csv`, `fig4b.csv` | efficiency vs. Δ/2π ∈ [-2, 2] MHz at T = 500 ns, jump (N = 4) and STIRAP |
//! | `fig5a.csv`, `fig5b.csv` | STIRAP population dynamics for T = 500 and 1800 ns |

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiments::{linspace, scan_detuning, sweep_time_jump, ProtocolKind, DEFAULT_SWEEP_POINTS};
use crate::io::{write_scan, write_trace, IoError, OutputFormat};
use crate::model::LEVEL_MINUS1;
use crate::propagate::{propagate_timedep, PropagateError};
use crate::schedules::StirapConfig;
use crate::smallmat::StateVector;
use crate::units;

/// Rabi parameter used throughout, Ω/2π in MHz.
pub const FIGURE_OMEGA_MHZ: f64 = 4.0;
/// Samples per STIRAP population trace.
pub const TRACE_SAMPLES: usize = 200;

#[derive(Debug, Error)]
pub enum FigureError {
    #[error(transparent)]
    Propagate(#[from] PropagateError),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl From<crate::schedules::ScheduleError> for FigureError {
    fn from(e: crate::schedules::ScheduleError) -> Self {
        FigureError::Propagate(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5];
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        };
        f.write_str(s)
    }
}

impl FromStr for Figure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Figure::ALL
            .into_iter()
            .find(|f| f.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown figure `{s}` (expected fig2, fig3, fig4 or fig5)"))
    }
}

fn omega() -> f64 {
    units::mhz_to_rad_per_us(FIGURE_OMEGA_MHZ)
}

fn jump_final_time(n: usize) -> f64 {
    n as f64 * std::f64::consts::PI / omega()
}

fn stirap_trace(dir: &Path, name: &str, total_ns: f64) -> Result<PathBuf, FigureError> {
    let c = StirapConfig::new(omega(), units::ns_to_us(total_ns))?;
    let (trace, _) = propagate_timedep(&c, &StateVector::basis(LEVEL_MINUS1), TRACE_SAMPLES)?;
    let path = dir.join(name);
    write_trace(&trace, &path, OutputFormat::Csv)?;
    Ok(path)
}

/// Writes every CSV for `figure` into `dir` and returns the paths in write order.
pub fn reproduce(figure: Figure, dir: &Path) -> Result<Vec<PathBuf>, FigureError> {
    std::fs::create_dir_all(dir).map_err(IoError::from)?;
    let mut written = Vec::new();
    match figure {
        Figure::Fig2 => {
            for (n, panel) in (1..=4).zip(['a', 'b', 'c', 'd']) {
                let times = linspace(0.0, jump_final_time(n), DEFAULT_SWEEP_POINTS);
                let sweep = sweep_time_jump(n, omega(), &times)?;
                let path = dir.join(format!("fig2{panel}.csv"));
                write_trace(&sweep.endpoints, &path, OutputFormat::Csv)?;
                written.push(path);
            }
        }
        Figure::Fig3 => {
            for n in 1..=4 {
                let times = linspace(0.0, jump_final_time(n), DEFAULT_SWEEP_POINTS);
                let sweep = sweep_time_jump(n, omega(), &times)?;
                let path = dir.join(format!("fig3a_n{n}.csv"));
                write_scan(&sweep.scan, &path, OutputFormat::Csv)?;
                written.push(path);
            }
            for total_ns in [500.0, 1200.0, 1800.0] {
                written.push(stirap_trace(dir, &format!("fig3b_t{total_ns}.csv"), total_ns)?);
            }
        }
        Figure::Fig4 => {
            let deltas: Vec<f64> = linspace(-2.0, 2.0, DEFAULT_SWEEP_POINTS)
                .into_iter()
                .map(units::mhz_to_rad_per_us)
                .collect();
            let total = jump_final_time(4);
            for (kind, name) in [(ProtocolKind::Jump { n_pulses: 4 }, "fig4a.csv"), (ProtocolKind::Stirap, "fig4b.csv")] {
                let scan = scan_detuning(kind, omega(), total, &deltas)?;
                let path = dir.join(name);
                write_scan(&scan, &path, OutputFormat::Csv)?;
                written.push(path);
            }
        }
        Figure::Fig5 => {
            written.push(stirap_trace(dir, "fig5a.csv", 500.0)?);
            written.push(stirap_trace(dir, "fig5b.csv", 1800.0)?);
        }
    }
    Ok(written)
}

/// Reproduces all figures.
pub fn reproduce_all(dir: &Path) -> Result<Vec<PathBuf>, FigureError> {
    let mut all = Vec::new();
    for f in Figure::ALL {
        all.extend(reproduce(f, dir)?);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_figure() {
        assert_eq!("fig4".parse::<Figure>().unwrap(), Figure::Fig4);
        assert_eq!("FIG2".parse::<Figure>().unwrap(), Figure::Fig2);
        assert!("fig6".parse::<Figure>().is_err());
    }

    #[test]
    fn fig2_files() {
        let dir = tempfile::tempdir().unwrap();
        let paths = reproduce(Figure::Fig2, dir.path()).unwrap();
        let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
        assert_eq!(names, ["fig2a.csv", "fig2b.csv", "fig2c.csv", "fig2d.csv"]);
        for (n, p) in (1..=4).zip(&paths) {
            let trace = crate::io::read_trace_csv(std::fs::File::open(p).unwrap()).unwrap();
            let last = trace.last().unwrap();
            assert!((units::us_to_ns(last.t) - 125.0 * n as f64).abs() < 1e-9);
            assert!((last.p_plus1 - 1.0).abs() < 1e-9);
            assert_eq!(trace.samples.len(), DEFAULT_SWEEP_POINTS);
        }
    }
}
