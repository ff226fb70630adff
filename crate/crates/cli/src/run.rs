use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::commands;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "hillgap",
    version,
    about = "Spectral gaps of Hill-Schrodinger operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for result and manifest files (stdout/stderr when omitted).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Gap endpoints and lengths for a potential.
    Gaps(GapsArgs),
    /// Remainders of the gap asymptotics and their decay exponents.
    Asymptotics(AsymptoticsArgs),
    /// Compare h^ω membership of the coefficients and of the gap lengths.
    MoCheck(MoCheckArgs),
    /// Tabulate a weight and estimate its orders.
    Weights(WeightsArgs),
    /// Ratio sweep ‖a∗b‖_{h^t} / (‖a‖_{h^s} ‖b‖_{h^r}) over truncation sizes.
    ConvLemma(ConvLemmaArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gaps(_) => "gaps",
            Command::Asymptotics(_) => "asymptotics",
            Command::MoCheck(_) => "mo-check",
            Command::Weights(_) => "weights",
            Command::ConvLemma(_) => "conv-lemma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GapsArgs {
    /// Potential spec file (JSON).
    #[arg(long)]
    pub potential: PathBuf,
    /// Galerkin half-size M.
    #[arg(long = "M", default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Richardson-extrapolate over M/4, M/2, M.
    #[arg(long)]
    pub extrapolate: bool,
    /// Explicit Galerkin sizes for extrapolation (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    /// Cross-check delta_comb potentials against the Kronig-Penney discriminant.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub out: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymptoticsArgs {
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long = "M", default_value_t = 256)]
    pub m: usize,
    #[arg(long, default_value_t = 32)]
    pub n_max: usize,
    /// Fit window `n_lo,n_hi`.
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "8,32")]
    pub fit_window: Vec<usize>,
    /// Sobolev index for the predicted exponent (taken from power_decay specs when omitted).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Weight for the membership verdicts (unit weight when omitted).
    #[arg(long)]
    pub weight: Option<PathBuf>,
    #[arg(long)]
    pub extrapolate: bool,
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct MoCheckArgs {
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long)]
    pub weight: PathBuf,
    #[arg(long = "M", default_value_t = 256)]
    pub m: usize,
    #[arg(long, default_value_t = 128)]
    pub n_max: usize,
    /// Analytic orders `mu,rho` instead of estimating them from the weight.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub orders: Option<Vec<f64>>,
    #[arg(long)]
    pub extrapolate: bool,
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct WeightsArgs {
    #[arg(long)]
    pub weight: PathBuf,
    /// Lower end of the order-estimation window (upper end is K).
    #[arg(long, default_value_t = 16)]
    pub k_min: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub out: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    /// Pick by the sign of s + r - t - 1/2.
    Auto,
    Damped,
    Witness,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvLemmaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "16,32,64,128,256,512,1024"
    )]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum, default_value_t = FamilyChoice::Auto)]
    pub family: FamilyChoice,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub out: Format,
}

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Numeric(anyhow::Error),
    Invariant(anyhow::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, err) = match self {
            Failure::Config(e) => ("configuration error", e),
            Failure::Numeric(e) => ("numeric failure", e),
            Failure::Invariant(e) => ("invariant violation", e),
        };
        if f.alternate() {
            write!(f, "{kind}: {err:#}")
        } else {
            write!(f, "{kind}: {err}")
        }
    }
}

impl From<hill_spectra::Error> for Failure {
    fn from(err: hill_spectra::Error) -> Self {
        use hill_spectra::Error as E;
        match err {
            E::Interlacing { .. } => Failure::Invariant(err.into()),
            E::Eigen(_) | E::Bracketing { .. } | E::InsufficientData { .. } => {
                Failure::Numeric(err.into())
            }
            _ => Failure::Config(err.into()),
        }
    }
}

pub fn config_error(msg: impl fmt::Display) -> Failure {
    Failure::Config(anyhow::anyhow!("{msg}"))
}

/// Result body produced by a subcommand.
pub struct Output {
    pub format: Format,
    pub body: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'static str,
    config: &'a Cli,
    tool_version: &'static str,
    library_version: &'static str,
    result_file: Option<String>,
    wall_time_seconds: f64,
    finished_unix_seconds: u64,
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let output = match &cli.command {
        Command::Gaps(args) => commands::gaps(args)?,
        Command::Asymptotics(args) => commands::asymptotics(args)?,
        Command::MoCheck(args) => commands::mo_check(args)?,
        Command::Weights(args) => commands::weights(args)?,
        Command::ConvLemma(args) => commands::conv_lemma(args)?,
    };
    let name = cli.command.name();
    let result_path = cli
        .output_dir
        .as_ref()
        .map(|dir| dir.join(format!("{name}.{}", output.format.extension())));
    let manifest = Manifest {
        command: name,
        config: cli,
        tool_version: env!("CARGO_PKG_VERSION"),
        library_version: hill_spectra::VERSION,
        result_file: result_path.as_ref().map(|p| p.display().to_string()),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        finished_unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let manifest_text = serde_json::to_string_pretty(&manifest)
        .context("serializing manifest")
        .map_err(Failure::Numeric)?;

    match (&cli.output_dir, result_path) {
        (Some(dir), Some(path)) => {
            write_outputs(dir, &path, &output.body, name, &manifest_text)
                .map_err(Failure::Config)?;
        }
        _ => {
            print!("{}", output.body);
            eprintln!("{manifest_text}");
        }
    }
    Ok(())
}

fn write_outputs(
    dir: &Path,
    result: &Path,
    body: &str,
    name: &str,
    manifest: &str,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(result, body).with_context(|| format!("writing {}", result.display()))?;
    let manifest_path = dir.join(format!("{name}.manifest.json"));
    std::fs::write(&manifest_path, format!("{manifest}\n"))
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(())
}
