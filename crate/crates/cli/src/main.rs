//! `starlike`: radii of starlikeness from the command line.
//!
//! Exit codes: 0 ok, 1 usage, 2 parameter, 3 no root, 4 verification failure.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use starlike_core::classbounds::ClassKind;
use starlike_core::extremal::SharpnessTable;
use starlike_core::regions::RegionTag;
use starlike_core::verify::Tamper;
use starlike_core::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parameter(String),
    NoRoot(String),
    Verification(String),
    Io { path: PathBuf, source: std::io::Error },
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parameter(_) | CliError::Io { .. } | CliError::Internal(_) => 2,
            CliError::NoRoot(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parameter(m) => write!(f, "parameter error: {m}"),
            CliError::NoRoot(m) => write!(f, "no root: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoRoot(_) | Error::Validity { .. } => CliError::NoRoot(e.to_string()),
            Error::Violation { .. } => CliError::Verification(e.to_string()),
            Error::Parameter(m) => CliError::Parameter(m),
            _ => CliError::Parameter(e.to_string()),
        }
    }
}

fn parse_class(s: &str) -> Result<ClassKind, String> {
    ClassKind::from_name(s).ok_or_else(|| format!("unknown class `{s}` (expected K1, K2 or K3)"))
}

fn parse_region(s: &str) -> Result<RegionTag, String> {
    RegionTag::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = RegionTag::ALL.iter().map(|t| t.name()).collect();
        format!("unknown region `{s}` (expected one of {})", names.join(", "))
    })
}

fn parse_table(s: &str) -> Result<SharpnessTable, String> {
    SharpnessTable::from_name(s).ok_or_else(|| format!("unknown sharpness table `{s}` (expected geometric or listed)"))
}

fn parse_tamper(s: &str) -> Result<Tamper, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RadiusFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Polynomial,
    MarginOracle,
}

#[derive(Debug, Parser)]
#[command(name = "starlike", version, about = "Radii of starlikeness for three Caratheodory-type classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Radius for one class and region.
    Radius(RadiusArgs),
    /// Sweep a parameter grid into a CSV or JSON table.
    Table(TableArgs),
    /// Run the verification matrix or a Monte Carlo lemma check.
    Verify(VerifyArgs),
    /// Export region boundary, extremal image curve and touch point as CSV.
    PlotData(PlotArgs),
}

/// Class parameters, raw `(b, c)` or normalized `(p1, p2)`.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long, value_parser = parse_class)]
    pub class: Option<ClassKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Normalized first parameter (K1 n~, K2 m, K3 u).
    #[arg(long, allow_negative_numbers = true)]
    pub p1: Option<f64>,
    /// Normalized second parameter (K2 n, K3 v).
    #[arg(long, allow_negative_numbers = true)]
    pub p2: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    #[arg(long, value_parser = parse_region)]
    pub region: RegionTag,
    /// Order of the half-plane region, in [0, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long, value_enum, default_value = "polynomial")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "text")]
    pub format: RadiusFormat,
    #[arg(long, value_parser = parse_table, default_value = "geometric")]
    pub sharpness_table: SharpnessTable,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Comma-separated classes.
    #[arg(long, value_delimiter = ',', value_parser = parse_class, default_value = "K1,K2,K3")]
    pub class: Vec<ClassKind>,
    /// Values of b: comma list or inclusive `start:stop:step`.
    #[arg(long, allow_hyphen_values = true, default_value = "-1:1:0.25")]
    pub b: String,
    /// Values of c, same syntax; ignored for K1.
    #[arg(long, allow_hyphen_values = true, default_value = "-1:1:0.25")]
    pub c: String,
    /// Comma-separated regions.
    #[arg(long, value_delimiter = ',', value_parser = parse_region)]
    pub regions: Vec<RegionTag>,
    /// Orders for the order region, same syntax as `--b`.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub alpha: String,
    /// Drop parameter combinations outside the class instead of failing.
    #[arg(long)]
    pub skip_invalid: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_table, default_value = "geometric")]
    pub sharpness_table: SharpnessTable,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Perturb one radius polynomial coefficient, e.g. `K3-S-P:c2:+0.1`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_tamper)]
    pub tamper: Option<Tamper>,
    /// Machine-readable per-cell report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, value_parser = parse_table, default_value = "geometric")]
    pub sharpness_table: SharpnessTable,
    /// Oracle agreement tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Boundary points per containment check.
    #[arg(long, default_value_t = starlike_core::verify::CONTAINMENT_SAMPLES)]
    pub samples: usize,
    /// Run only the Monte Carlo lemma check.
    #[arg(long)]
    pub lemma: bool,
    #[arg(long, allow_negative_numbers = true, requires = "lemma")]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "lemma")]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Omit for a region-only export.
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long, default_value_t = 720)]
    pub samples: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_parser = parse_table, default_value = "geometric")]
    pub sharpness_table: SharpnessTable,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("STARLIKE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("STARLIKE_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Radius(a) => commands::radius(&a),
        Command::Table(a) => commands::table(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::PlotData(a) => commands::plot_data(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("starlike: {e}");
            ExitCode::from(e.code())
        }
    }
}
