//! CSV and JSON output for traces and scans.
//!
//! CSV schemas (header row mandatory):
//! - traces: `t_ns,p0,p_minus1,p_plus1`
//! - scans: `param_value,efficiency`
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the written values exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiments::{ScanPoint, ScanResult};
use crate::propagate::{PopulationSample, PopulationTrace};
use crate::units;

pub const TRACE_HEADER: [&str; 4] = ["t_ns", "p0", "p_minus1", "p_plus1"];
pub const SCAN_HEADER: [&str; 2] = ["param_value", "efficiency"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema mismatch: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

pub fn write_trace_csv<W: Write>(trace: &PopulationTrace, w: W) -> Result<(), IoError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(TRACE_HEADER)?;
    for s in &trace.samples {
        wr.write_record(&[
            units::us_to_ns(s.t).to_string(),
            s.p0.to_string(),
            s.p_minus1.to_string(),
            s.p_plus1.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

fn check_header(rd: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<(), IoError> {
    let header = rd.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(IoError::Schema(format!("expected header {:?}, found {:?}", expected, header)));
    }
    Ok(())
}

fn parse_field(rec: &csv::StringRecord, i: usize) -> Result<f64, IoError> {
    let raw = rec.get(i).ok_or_else(|| IoError::Schema(format!("missing column {i}")))?;
    raw.trim().parse().map_err(|_| IoError::Schema(format!("not a number: `{raw}`")))
}

/// Reads a trace CSV; metadata is not part of the CSV and comes back empty.
pub fn read_trace_csv<R: Read>(r: R) -> Result<PopulationTrace, IoError> {
    let mut rd = csv::Reader::from_reader(r);
    check_header(&mut rd, &TRACE_HEADER)?;
    let mut trace = PopulationTrace::new("csv");
    for rec in rd.records() {
        let rec = rec?;
        let t = units::ns_to_us(parse_field(&rec, 0)?);
        if trace.last().is_some_and(|s| t <= s.t) {
            return Err(IoError::Schema("trace times must be strictly increasing".into()));
        }
        trace.push(PopulationSample {
            t,
            p0: parse_field(&rec, 1)?,
            p_minus1: parse_field(&rec, 2)?,
            p_plus1: parse_field(&rec, 3)?,
        });
    }
    Ok(trace)
}

pub fn write_scan_csv<W: Write>(scan: &ScanResult, w: W) -> Result<(), IoError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(SCAN_HEADER)?;
    for p in &scan.points {
        wr.write_record(&[p.value.to_string(), p.efficiency.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a scan CSV; parameter name, unit and metadata come back empty.
pub fn read_scan_csv<R: Read>(r: R) -> Result<ScanResult, IoError> {
    let mut rd = csv::Reader::from_reader(r);
    check_header(&mut rd, &SCAN_HEADER)?;
    let mut points = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        points.push(ScanPoint { value: parse_field(&rec, 0)?, efficiency: parse_field(&rec, 1)? });
    }
    Ok(ScanResult::new("", "", "csv").from_unsorted(points))
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_trace(trace: &PopulationTrace, path: &Path, format: OutputFormat) -> Result<(), IoError> {
    match format {
        OutputFormat::Csv => write_trace_csv(trace, create(path)?),
        OutputFormat::Json => write_json(trace, path),
    }
}

pub fn write_scan(scan: &ScanResult, path: &Path, format: OutputFormat) -> Result<(), IoError> {
    match format {
        OutputFormat::Csv => write_scan_csv(scan, create(path)?),
        OutputFormat::Json => write_json(scan, path),
    }
}
