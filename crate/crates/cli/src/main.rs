//! `aqfock`: construct, classify and verify radial Bargmann measures of the
//! (α,q)-Gaussian law.

mod commands;
mod suites;
mod table;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use aqfock_core::{Precision, QParams, TruncationPolicy};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_NO_REPRESENTATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "aqfock",
    version,
    about = "Radial Bargmann measures, (alpha,q)-Fock operators and type-B Gram checks",
    after_help = "Exit codes: 0 success, 1 verification failure, 2 no radial representation, 64 usage error.\n\
                  Set AQFOCK_PRECISION=extended for double-double infinite products."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the radial measure as JSON (schema aqfock/1) or CSV `r,w`
    Measure(MeasureArgs),
    /// Decide whether a positive radial measure exists
    ///
    /// CSV columns: alpha,q,exists,branch,reason
    Classify(ClassifyArgs),
    /// Moment table
    ///
    /// CSV columns: k,nu_moment,fock_norm,radial_moment. `nu_moment` is the
    /// k-th moment of the law, `fock_norm` is [omega_k]!, and `radial_moment`
    /// is the 2k-th moment of the radial measure (empty if none exists).
    Moments(MomentsArgs),
    /// Density sampled on a uniform interior grid of the support
    ///
    /// CSV columns: x,density
    Density(DensityArgs),
    /// Brute-force type-B Gram norms and vacuum moments against references
    ///
    /// CSV columns: quantity,k,brute_force,reference,abs_error
    Typeb(TypebArgs),
    /// Run a verification suite; exit 1 if any check fails
    ///
    /// CSV columns: suite,check,dim,value,limit,status
    Verify(VerifyArgs),
    /// Existence map over a square (alpha,q) grid in [-0.95, 0.95]
    ///
    /// CSV columns: alpha,q,exists,branch,min_weight (empty when no measure
    /// can be formed). Rows are sorted by alpha, then q.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
}

impl ParamArgs {
    pub fn params(&self) -> Result<QParams, UsageError> {
        QParams::new(self.alpha, self.q).map_err(|e| UsageError(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct TruncArgs {
    /// Truncation tolerance for infinite products and series
    #[arg(long, default_value_t = 1e-16)]
    pub tol: f64,
    /// Cap on the number of terms of any truncated series
    #[arg(long, default_value_t = 10_000)]
    pub max_terms: usize,
}

impl TruncArgs {
    pub fn policy(&self) -> anyhow::Result<TruncationPolicy> {
        let precision = Precision::from_env().map_err(|e| UsageError(e.to_string()))?;
        Ok(TruncationPolicy::new(self.tol, self.max_terms)
            .map_err(|e| UsageError(e.to_string()))?
            .with_precision(precision))
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CsvOutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Apply the t-deformation (t >= 1)
    #[arg(long)]
    pub t: Option<f64>,
    /// Emit the signed moment-matching measure even when it is not positive
    #[arg(long)]
    pub force: bool,
    /// Treat |alpha - q| <= epsilon as alpha = q
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Treat |alpha - q| <= epsilon as alpha = q
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 12)]
    pub kmax: usize,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub out: CsvOutputArgs,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of interior sample points
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub out: CsvOutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InvolutionPreset {
    /// f-bar = f
    Plus,
    /// f-bar = -f
    Minus,
}

#[derive(Debug, Args)]
pub struct TypebArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Tensor rank, 1..=5
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = InvolutionPreset::Plus)]
    pub involution: InvolutionPreset,
    #[arg(long, default_value_t = aqfock_core::density::DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub out: CsvOutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Qcalc,
    Radial,
    Density,
    Fock1,
    Typeb,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Matrix dimension for the one-mode operator checks
    #[arg(long, default_value_t = 24)]
    pub dim: usize,
    /// Largest tensor rank for the type-B checks
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = aqfock_core::density::DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    #[command(flatten)]
    pub out: CsvOutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Points per axis
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[command(flatten)]
    pub out: CsvOutputArgs,
}

/// Bad input detected after argument parsing; exits with the usage code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Finished command: text to emit and the exit code to return.
pub struct Report {
    pub body: String,
    pub code: u8,
}

impl Report {
    pub fn ok(body: String) -> Self {
        Self { body, code: 0 }
    }
}

pub fn emit(text: &str, output: Option<&PathBuf>) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let (report, output) = match &cli.command {
        Command::Measure(a) => (commands::measure(a)?, a.out.output.as_ref()),
        Command::Classify(a) => (commands::classify_cmd(a)?, a.out.output.as_ref()),
        Command::Moments(a) => (commands::moments(a)?, a.out.output.as_ref()),
        Command::Density(a) => (commands::density(a)?, a.out.output.as_ref()),
        Command::Typeb(a) => (commands::typeb(a)?, a.out.output.as_ref()),
        Command::Verify(a) => (suites::verify(a)?, a.out.output.as_ref()),
        Command::Sweep(a) => (commands::sweep(a)?, a.out.output.as_ref()),
    };
    emit(&report.body, output)?;
    Ok(report.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_VERIFY_FAILED)
            }
        }
    }
}
