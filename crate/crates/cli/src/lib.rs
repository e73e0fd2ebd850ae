//! Argument parsing, output formats and exit-code mapping for the
//! `horizon-teleport` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use horizon_teleport::analysis::{
    self, AnalysisError, AxisScale, ConvergenceRow, SweepGrid, SweepMode, SweepOptions, SweepRecord,
};
use horizon_teleport::channel::{self, ChannelError, SqueezeParams};
use horizon_teleport::teleport::{self, TeleportError, TeleportReport, DEFAULT_MAX_CUTOFF};
use horizon_teleport::{DualRailQubit, ProtocolConfig};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub const THREADS_ENV: &str = "HORIZON_TELEPORT_THREADS";

/// Column order of sweep and fidelity output.
pub const SWEEP_HEADER: [&str; 9] = [
    "radius",
    "omega",
    "mass",
    "r_squeeze",
    "fidelity_analytic",
    "fidelity_numeric",
    "n_max",
    "truncation_loss",
    "flags",
];

pub const CONVERGE_HEADER: [&str; 3] = ["n_max", "abs_error", "truncation_loss"];

#[derive(Debug, Parser)]
#[command(name = "horizon-teleport", version, about = "Teleportation fidelity across a Schwarzschild horizon")]
pub struct Cli {
    /// Multiplier s in tanh r = exp(-2π·s·M·Ω).
    #[arg(long, global = true, default_value_t = 1.0)]
    pub exponent_scale: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form fidelity at one (mass or radius, Ω) point.
    Fidelity(FidelityArgs),
    /// Brute-force protocol simulation for one input qubit.
    Simulate(SimulateArgs),
    /// Fidelity over a (radius, Ω) grid.
    Sweep(SweepArgs),
    /// Numeric-vs-analytic error along a list of Bob cutoffs.
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

impl From<Scale> for AxisScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Linear => AxisScale::Linear,
            Scale::Log => AxisScale::Log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analytic,
    Simulate,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Black-hole mass M (Planck units).
    #[arg(long, conflicts_with = "radius")]
    pub mass: Option<f64>,
    /// Horizon radius r₊ = 2M.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Mode frequency Ω.
    #[arg(long)]
    pub omega: f64,
}

impl PointArgs {
    /// (radius, mass), validated.
    fn radius_mass(&self) -> Result<(f64, f64), CliError> {
        match (self.mass, self.radius) {
            (Some(m), None) => {
                if !(m > 0.0 && m.is_finite()) {
                    return Err(CliError::Usage(format!("mass must be positive and finite, got {m}")));
                }
                Ok((2.0 * m, m))
            }
            (None, Some(r)) => Ok((r, channel::radius_to_mass(r)?)),
            _ => Err(CliError::Usage("give exactly one of --mass or --radius".into())),
        }
    }

    fn params(&self, exponent_scale: f64) -> Result<(f64, f64, SqueezeParams), CliError> {
        let (radius, mass) = self.radius_mass()?;
        let params = SqueezeParams::from_mass_frequency(mass, self.omega, exponent_scale)?;
        Ok((radius, mass, params))
    }
}

#[derive(Debug, Clone, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_im: f64,
    /// Truncation tail budget for Bob's cutoff.
    #[arg(long, default_value_t = 1e-10)]
    pub epsilon: f64,
    /// Largest Bob cutoff tried before giving up.
    #[arg(long, default_value_t = DEFAULT_MAX_CUTOFF)]
    pub max_cutoff: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub radius_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius_max: f64,
    #[arg(long, default_value_t = 50)]
    pub radius_steps: usize,
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub radius_scale: Scale,
    #[arg(long, default_value_t = 1e-3)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 50)]
    pub omega_steps: usize,
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub omega_scale: Scale,
    #[arg(long, value_enum, default_value_t = Mode::Analytic)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1e-10)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 40)]
    pub max_cutoff: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl SweepArgs {
    pub fn grid(&self) -> SweepGrid {
        SweepGrid {
            radius_min: self.radius_min,
            radius_max: self.radius_max,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            radius_steps: self.radius_steps,
            omega_steps: self.omega_steps,
            radius_scale: self.radius_scale.into(),
            omega_scale: self.omega_scale.into(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    /// Squeezing given directly as tanh r.
    #[arg(long, conflicts_with_all = ["mass", "radius", "omega"])]
    pub tanh_r: Option<f64>,
    #[arg(long, conflicts_with = "radius")]
    pub mass: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Comma-separated, strictly ascending Bob cutoffs.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1)]
    pub cutoffs: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Divergent(String),
    #[error("{0}")]
    CutoffInfeasible(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io { .. } => 1,
            Self::Divergent(_) => 2,
            Self::CutoffInfeasible(_) => 3,
        }
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::DivergentSqueezing { .. } => Self::Divergent(e.to_string()),
            ChannelError::CutoffInfeasible { .. } => Self::CutoffInfeasible(e.to_string()),
            other => Self::Usage(other.to_string()),
        }
    }
}

impl From<TeleportError> for CliError {
    fn from(e: TeleportError) -> Self {
        match e {
            TeleportError::Channel(c) => c.into(),
            other => Self::Usage(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Channel(c) => c.into(),
            AnalysisError::Teleport(t) => t.into(),
            other => Self::Usage(other.to_string()),
        }
    }
}

/// Seventeen significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn csv_err(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

pub fn sweep_row(r: &SweepRecord) -> [String; 9] {
    [
        fmt_float(r.radius),
        fmt_float(r.omega),
        fmt_float(r.mass),
        opt_float(r.r_squeeze),
        fmt_float(r.fidelity_analytic),
        opt_float(r.fidelity_numeric),
        r.n_max.map(|n| n.to_string()).unwrap_or_default(),
        opt_float(r.truncation_loss),
        r.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join("|"),
    ]
}

pub fn write_records<W: Write>(w: W, records: &[SweepRecord], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv_writer(w);
            out.write_record(SWEEP_HEADER).map_err(csv_err)?;
            for r in records {
                out.write_record(sweep_row(r)).map_err(csv_err)?;
            }
            out.flush()
        }
        Format::Json => write_json(w, records),
    }
}

pub fn write_convergence<W: Write>(w: W, rows: &[ConvergenceRow], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv_writer(w);
            out.write_record(CONVERGE_HEADER).map_err(csv_err)?;
            for r in rows {
                out.write_record([r.n_max.to_string(), fmt_float(r.abs_error), fmt_float(r.truncation_loss)])
                    .map_err(csv_err)?;
            }
            out.flush()
        }
        Format::Json => write_json(w, rows),
    }
}

fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}

#[derive(Debug, Serialize)]
struct OutcomeRow {
    label: &'static str,
    probability: f64,
    fidelity: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    fidelity_analytic: f64,
    fidelity_mean: Option<f64>,
    abs_deviation: Option<f64>,
    n_max: usize,
    truncation_loss: f64,
}

#[derive(Debug, Serialize)]
struct SimulationOutput {
    outcomes: Vec<OutcomeRow>,
    #[serde(flatten)]
    summary: SimulationSummary,
}

fn simulation_output(report: &TeleportReport) -> SimulationOutput {
    let mean = report.mean_fidelity();
    SimulationOutput {
        outcomes: report
            .outcomes
            .iter()
            .map(|o| OutcomeRow {
                label: o.label.as_str(),
                probability: o.probability,
                fidelity: o.fidelity,
            })
            .collect(),
        summary: SimulationSummary {
            fidelity_analytic: report.fidelity_analytic,
            fidelity_mean: mean,
            abs_deviation: mean.map(|f| (f - report.fidelity_analytic).abs()),
            n_max: report.n_max,
            truncation_loss: report.truncation_loss,
        },
    }
}

/// Outcome table, a blank line, then a one-row summary table.
pub fn write_simulation<W: Write>(mut w: W, report: &TeleportReport, format: Format) -> io::Result<()> {
    let out = simulation_output(report);
    if format == Format::Json {
        return write_json(w, &out);
    }
    {
        let mut t = csv_writer(&mut w);
        t.write_record(["label", "probability", "fidelity"]).map_err(csv_err)?;
        for o in &out.outcomes {
            t.write_record([o.label.to_string(), fmt_float(o.probability), opt_float(o.fidelity)])
                .map_err(csv_err)?;
        }
        t.flush()?;
    }
    w.write_all(b"\n")?;
    let s = &out.summary;
    let mut t = csv_writer(&mut w);
    t.write_record(["fidelity_analytic", "fidelity_mean", "abs_deviation", "n_max", "truncation_loss"])
        .map_err(csv_err)?;
    t.write_record([
        fmt_float(s.fidelity_analytic),
        opt_float(s.fidelity_mean),
        opt_float(s.abs_deviation),
        s.n_max.to_string(),
        fmt_float(s.truncation_loss),
    ])
    .map_err(csv_err)?;
    t.flush()
}

fn with_sink<F>(out: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match out {
        Some(path) => {
            let io_err = |source| CliError::Io {
                path: path.display().to_string(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            f(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => f(stdout).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

pub fn cmd_fidelity(args: &FidelityArgs, exponent_scale: f64, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (radius, _, _) = args.point.params(exponent_scale)?;
    let opts = SweepOptions {
        exponent_scale,
        ..SweepOptions::default()
    };
    let record = analysis::evaluate_point(radius, args.point.omega, &opts)?;
    with_sink(None, stdout, |w| match args.format {
        Format::Csv => write_records(w, std::slice::from_ref(&record), Format::Csv),
        Format::Json => write_json(w, &record),
    })
}

pub fn cmd_simulate(args: &SimulateArgs, exponent_scale: f64, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (_, _, params) = args.point.params(exponent_scale)?;
    let input = DualRailQubit::with_tolerance(
        Complex64::new(args.alpha_re, args.alpha_im),
        Complex64::new(args.beta_re, args.beta_im),
        1e-6,
    )?;
    let mut config = ProtocolConfig::new(params, input).with_epsilon(args.epsilon);
    config.max_cutoff = args.max_cutoff;
    let report = teleport::run_protocol(&config)?;
    with_sink(None, stdout, |w| write_simulation(w, &report, args.format))
}

pub fn cmd_sweep(args: &SweepArgs, exponent_scale: f64, stdout: &mut dyn Write) -> Result<(), CliError> {
    let opts = SweepOptions {
        mode: match args.mode {
            Mode::Analytic => SweepMode::Analytic,
            Mode::Simulate => SweepMode::Simulate,
        },
        epsilon: args.epsilon,
        max_cutoff: args.max_cutoff,
        exponent_scale,
    };
    let records = analysis::sweep(&args.grid(), &opts)?;
    with_sink(args.out.as_deref(), stdout, |w| write_records(w, &records, args.format))
}

pub fn cmd_converge(args: &ConvergeArgs, exponent_scale: f64, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = match (args.tanh_r, args.omega) {
        (Some(t), _) => SqueezeParams::from_tanh(t)?,
        (None, Some(omega)) => {
            let point = PointArgs {
                mass: args.mass,
                radius: args.radius,
                omega,
            };
            point.params(exponent_scale)?.2
        }
        (None, None) => return Err(CliError::Usage("give --tanh-r, or --omega with --mass or --radius".into())),
    };
    let rows = analysis::convergence_report(&params, &args.cutoffs, &analysis::sweep_probe())?;
    with_sink(args.out.as_deref(), stdout, |w| write_convergence(w, &rows, args.format))
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let s = cli.exponent_scale;
    match &cli.command {
        Command::Fidelity(a) => cmd_fidelity(a, s, stdout),
        Command::Simulate(a) => cmd_simulate(a, s, stdout),
        Command::Sweep(a) => cmd_sweep(a, s, stdout),
        Command::Converge(a) => cmd_converge(a, s, stdout),
    }
}

/// Thread cap from the environment; `None` means let rayon decide.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(CliError::Usage(format!("{THREADS_ENV} must be a nonnegative integer, got {v:?}"))),
        },
    }
}
