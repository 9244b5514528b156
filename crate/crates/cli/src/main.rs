use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geojump::experiments::{linspace, monte_carlo_static_noise, scan_detuning_protocol, Protocol, ScanPoint, ScanResult};
use geojump::figures::{reproduce, reproduce_all, Figure, FigureError};
use geojump::io::{write_scan, write_trace, IoError, OutputFormat};
use geojump::model::LEVEL_MINUS1;
use geojump::propagate::{propagate_piecewise, propagate_timedep, PropagateError};
use geojump::schedules::{make_jump_schedule, stretch_schedule, ScheduleDump, ScheduleError, StirapConfig};
use geojump::units::{mhz_to_rad_per_us, ns_to_us, us_to_ns};
use geojump::{PopulationTrace, StateVector};

mod config;
mod verify;

use config::{OutputSpec, ProtocolName, RunConfig, SweepParameter, SweepSpec, Validated, ValidationError};

/// Default directory for output files.
const OUT_DIR_ENV: &str = "GEOJUMP_OUT_DIR";
const TRACE_SAMPLES_PER_SEGMENT: usize = 50;
const STIRAP_TRACE_SAMPLES: usize = 200;

#[derive(Parser)]
#[command(name = "geojump", version, about = "Jump-protocol and STIRAP population transfer in a three-level system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol (or a sweep) and write the populations or efficiencies.
    Simulate(RunArgs),
    /// Run the built-in invariant checks.
    Verify,
    /// Write the CSV data behind a figure: fig2, fig3, fig4, fig5 or all.
    Reproduce {
        figure: String,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print or write the pulse schedule as JSON.
    DumpSchedule(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolName>,
    /// Number of jump pulses.
    #[arg(long)]
    n: Option<usize>,
    /// Ω/2π in MHz.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Total time in ns.
    #[arg(long, allow_hyphen_values = true)]
    time: Option<f64>,
    /// Detuning Δ/2π in MHz.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Sweep as param:start:stop:points with param one of time, delta, n.
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<SweepSpec>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Seed for the static-noise average.
    #[arg(long)]
    seed: Option<u64>,
    /// STIRAP integrator step in ns.
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    /// Standard deviation of a static detuning Δ/2π in MHz; enables the noise average.
    #[arg(long, allow_hyphen_values = true)]
    sigma_delta: Option<f64>,
    /// Number of noise samples.
    #[arg(long)]
    samples: Option<usize>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, Failure> {
        let file = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            protocol: self.protocol,
            omega_mhz: self.omega,
            n_pulses: self.n,
            total_time_ns: self.time,
            delta_mhz: self.delta,
            dt_ns: self.dt,
            sweep: self.sweep,
            output: OutputSpec { path: self.out, format: self.format },
            seed: self.seed,
            sigma_delta_mhz: self.sigma_delta,
            samples: self.samples,
        };
        Ok(file.overridden_by(flags))
    }
}

enum Failure {
    Validation(ValidationError),
    NonConvergence(String),
    Other(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Validation(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Failure::NonConvergence(m) => {
                eprintln!("error: {m}");
                ExitCode::from(3)
            }
            Failure::Other(m) => {
                eprintln!("error: {m}");
                ExitCode::from(1)
            }
        }
    }
}

impl From<ValidationError> for Failure {
    fn from(e: ValidationError) -> Self {
        Failure::Validation(e)
    }
}

impl From<ScheduleError> for Failure {
    fn from(e: ScheduleError) -> Self {
        let field = match &e {
            ScheduleError::InvalidPulseCount(_) => "n_pulses",
            ScheduleError::InvalidParameter { name, .. } => match *name {
                "omega" => "omega_mhz",
                "total_time" => "total_time_ns",
                "dt" => "dt_ns",
                "detuning" => "delta_mhz",
                _ => "config",
            },
            ScheduleError::TimeOutOfRange { .. } => "total_time_ns",
        };
        Failure::Validation(ValidationError { field, message: e.to_string() })
    }
}

impl From<PropagateError> for Failure {
    fn from(e: PropagateError) -> Self {
        match e {
            PropagateError::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            PropagateError::Schedule(s) => s.into(),
            PropagateError::Model(m) => Failure::Validation(ValidationError { field: "omega_mhz", message: m.to_string() }),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<FigureError> for Failure {
    fn from(e: FigureError) -> Self {
        match e {
            FigureError::Propagate(p) => p.into(),
            FigureError::Io(io) => io.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => args.into_config().and_then(simulate),
        Command::Verify => return cmd_verify(),
        Command::Reproduce { figure, out } => cmd_reproduce(&figure, out),
        Command::DumpSchedule(args) => args.into_config().and_then(dump_schedule),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn extension(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn output_path(v: &Validated, stem: &str) -> PathBuf {
    v.out.clone().unwrap_or_else(|| default_out_dir().join(format!("{stem}.{}", extension(v.format))))
}

fn omega(v: &Validated) -> f64 {
    mhz_to_rad_per_us(v.omega_mhz)
}

fn exact_time_ns(n: usize, omega_mhz: f64) -> f64 {
    // π/Ω per pulse, Ω in rad/ns = 2π·MHz·1e-3
    n as f64 * 1e3 / (2.0 * omega_mhz)
}

fn stirap_config(v: &Validated, total_time_ns: f64) -> Result<StirapConfig, Failure> {
    let mut c = StirapConfig::new(omega(v), ns_to_us(total_time_ns))?.with_detuning(mhz_to_rad_per_us(v.delta_mhz))?;
    if let Some(dt) = v.dt_ns {
        c = c.with_dt(ns_to_us(dt))?;
    }
    Ok(c)
}

fn protocol(v: &Validated, n_pulses: Option<usize>, total_time_ns: f64) -> Result<Protocol, Failure> {
    Ok(match v.protocol {
        ProtocolName::Jump => Protocol::Jump {
            n_pulses: n_pulses.expect("validated"),
            omega: omega(v),
            total_time: ns_to_us(total_time_ns),
            delta: mhz_to_rad_per_us(v.delta_mhz),
        },
        ProtocolName::Stirap => Protocol::Stirap(stirap_config(v, total_time_ns)?),
    })
}

fn simulate(config: RunConfig) -> Result<(), Failure> {
    let v = config.validate()?;
    match v.sweep {
        Some(sweep) => simulate_sweep(&v, sweep),
        None => simulate_single(&v),
    }
}

fn simulate_single(v: &Validated) -> Result<(), Failure> {
    let total_ns = v.total_time_ns.expect("validated");
    let psi0 = StateVector::basis(LEVEL_MINUS1);
    let trace: PopulationTrace = match v.protocol {
        ProtocolName::Jump => {
            let n = v.n_pulses.expect("validated");
            let s = stretch_schedule(&make_jump_schedule(n, omega(v))?, ns_to_us(total_ns))?;
            propagate_piecewise(&s, mhz_to_rad_per_us(v.delta_mhz), &psi0, TRACE_SAMPLES_PER_SEGMENT)?.0
        }
        ProtocolName::Stirap => propagate_timedep(&stirap_config(v, total_ns)?, &psi0, STIRAP_TRACE_SAMPLES)?.0,
    };
    let efficiency = trace.last().expect("trace has the initial sample").p_plus1;
    let path = output_path(v, &format!("{}_trace", v.protocol));
    write_trace(&trace, &path, v.format)?;
    println!("efficiency = {efficiency:.6}");

    if let Some(noise) = v.noise {
        let p = protocol(v, v.n_pulses, total_ns)?;
        let est = monte_carlo_static_noise(&p, mhz_to_rad_per_us(noise.sigma_mhz), noise.samples, noise.seed)?;
        println!(
            "noise-averaged efficiency = {:.6} (std dev {:.6}, {} samples, sigma {} MHz, seed {})",
            est.mean, est.std_dev, est.n_samples, noise.sigma_mhz, noise.seed
        );
    }
    Ok(())
}

fn simulate_sweep(v: &Validated, sweep: SweepSpec) -> Result<(), Failure> {
    let values = linspace(sweep.start, sweep.stop, sweep.points);
    let scan = match sweep.parameter {
        SweepParameter::Delta => {
            let base = protocol(v, v.n_pulses, v.total_time_ns.expect("validated"))?;
            let deltas: Vec<f64> = values.iter().map(|&d| mhz_to_rad_per_us(d)).collect();
            scan_detuning_protocol(&base, &deltas)?
        }
        SweepParameter::Time => {
            let mut points = Vec::with_capacity(values.len());
            for &t in &values {
                let efficiency = protocol(v, v.n_pulses, t)?.efficiency()?;
                points.push(ScanPoint { value: t, efficiency });
            }
            ScanResult::new("time", "ns", &v.protocol.to_string()).from_unsorted(points)
        }
        SweepParameter::N => {
            let mut points = Vec::with_capacity(values.len());
            for &x in &values {
                let n = x.round() as usize;
                let t = v.total_time_ns.unwrap_or_else(|| exact_time_ns(n, v.omega_mhz));
                let efficiency = protocol(v, Some(n), t)?.efficiency()?;
                points.push(ScanPoint { value: n as f64, efficiency });
            }
            ScanResult::new("n", "", &v.protocol.to_string()).from_unsorted(points)
        }
    };
    let scan = scan.with_metadata("omega_mhz", v.omega_mhz);
    let path = output_path(v, &format!("{}_scan_{}", v.protocol, sweep.parameter.label()));
    write_scan(&scan, &path, v.format)?;
    for p in &scan.points {
        let unit = sweep.parameter.unit();
        println!("{} = {}{}{}: efficiency = {:.6}", sweep.parameter.label(), p.value, if unit.is_empty() { "" } else { " " }, unit, p.efficiency);
    }
    Ok(())
}

fn dump_schedule(mut config: RunConfig) -> Result<(), Failure> {
    if config.protocol == Some(ProtocolName::Jump) && config.total_time_ns.is_none() {
        if let (Some(n), Some(w)) = (config.n_pulses, config.omega_mhz) {
            config.total_time_ns = Some(exact_time_ns(n, w));
        }
    }
    if config.sweep.is_some() {
        return Err(ValidationError { field: "sweep", message: "not supported by dump-schedule".into() }.into());
    }
    let v = config.validate()?;
    let total_ns = v.total_time_ns.expect("validated");
    let dump = match v.protocol {
        ProtocolName::Jump => {
            let s = make_jump_schedule(v.n_pulses.expect("validated"), omega(&v))?;
            let s = if (us_to_ns(s.total_time()) - total_ns).abs() <= 1e-9 * total_ns {
                s
            } else {
                stretch_schedule(&s, ns_to_us(total_ns))?
            };
            ScheduleDump::from(&s)
        }
        ProtocolName::Stirap => ScheduleDump::from(&stirap_config(&v, total_ns)?),
    };
    let json = serde_json::to_string_pretty(&dump).map_err(|e| Failure::Other(e.to_string()))?;
    match &v.out {
        Some(path) => write_file(path, &json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn cmd_verify() -> ExitCode {
    let checks = verify::run();
    let mut all = true;
    for c in &checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        all &= c.passed;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_reproduce(figure: &str, out: Option<PathBuf>) -> Result<(), Failure> {
    let dir = out.unwrap_or_else(default_out_dir);
    let files = if figure.eq_ignore_ascii_case("all") {
        reproduce_all(&dir)?
    } else {
        let f: Figure = figure
            .parse()
            .map_err(|message| Failure::Validation(ValidationError { field: "figure", message }))?;
        reproduce(f, &dir)?
    };
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

