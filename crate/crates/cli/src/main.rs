//! `qgrass`: batch frontend for qgrass-core. Every run prints one JSON report
//! on stdout and a short human summary on stderr.

mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qgrass_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qgrass", version, about = "Exact computations on q-Kneser graphs and Grassmann schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SchemeArgs {
    /// Field order
    #[arg(long)]
    pub q: u32,
    /// Ambient dimension
    #[arg(long)]
    pub n: usize,
    /// Subspace dimension
    #[arg(long)]
    pub k: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gaussian binomial [n, k]_q
    Gauss(SchemeArgs),
    /// List every k-space of GF(q)^n in canonical order
    Enumerate {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Write the subspaces to this file instead of the report
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Eigenmatrices, multiplicities and optional brute-force validation
    Scheme(SchemeCmd),
    /// Build or load a family and audit it
    Family(FamilyCmd),
    /// Spectral bound calculators
    Bound(BoundCmd),
    /// Quotient a family by a line through a point
    Quotient(QuotientCmd),
    /// Cross-intersection check of two families
    Cross(CrossCmd),
    /// Largest intersecting family in no dictator and no dual dictator
    Search(SearchCmd),
    /// Chromatic number of qK_{n:k}
    Chromatic(ChromaticCmd),
    /// Inequality certificates
    Certify(CertifyCmd),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SchemeCmd {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Check the scheme axioms on the enumerated k-spaces
    #[arg(long)]
    pub validate: bool,
    /// Sampled pairs when v > 200
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also compute exact spectra of the explicit relation matrices (v <= 400)
    #[arg(long)]
    pub spectra: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyType {
    Dictator,
    Dual,
    Hm,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FamilyCmd {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long = "type", value_enum, conflicts_with = "input")]
    pub family_type: Option<FamilyType>,
    /// Family file, one subspace per line
    #[arg(long)]
    pub input: Option<std::path::PathBuf>,
    /// Point for dictator and hm families, e.g. `1000`
    #[arg(long)]
    pub point: Option<String>,
    /// Hyperplane for dual families, e.g. `1000;0100;0010`
    #[arg(long)]
    pub hyperplane: Option<String>,
    /// The k-space T of an hm family
    #[arg(long)]
    pub t: Option<String>,
    /// Relation index for the spectral audit (defaults to k when the family is intersecting)
    #[arg(long)]
    pub relation: Option<usize>,
    /// Also compute covering dimensions
    #[arg(long)]
    pub cover: bool,
    /// Write the members to this file
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Hoffman,
    Stability,
    Averaging,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundCmd {
    #[arg(value_enum)]
    pub kind: BoundKind,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Relation index
    #[arg(long)]
    pub i: usize,
    /// Family size
    #[arg(long)]
    pub y: Option<String>,
    /// Energy outside <j> + V_1, as an integer or fraction
    #[arg(long)]
    pub energy: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QuotientCmd {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long)]
    pub input: std::path::PathBuf,
    #[arg(long)]
    pub line: String,
    #[arg(long)]
    pub point: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CrossCmd {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, requires = "z")]
    pub y: Option<std::path::PathBuf>,
    #[arg(long, requires = "y")]
    pub z: Option<std::path::PathBuf>,
    /// Check this many greedily grown random pairs
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SearchCmd {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
    /// Relabel vertices with this seed before searching
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChromaticCmd {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Only report the spectral lower bound and the DSATUR upper bound
    #[arg(long, conflicts_with = "exact")]
    pub bounds: bool,
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CertifyCmd {
    /// Claim id or `all`
    #[arg(long)]
    pub claim: String,
    #[arg(long, default_value_t = qgrass_core::certificates::DEFAULT_Q_MAX)]
    pub qmax: u32,
    #[arg(long, default_value_t = qgrass_core::certificates::DEFAULT_K_MAX)]
    pub kmax: u32,
    /// Include every individual check in the report
    #[arg(long)]
    pub full: bool,
}

#[derive(Serialize)]
pub struct RunReport<P: Serialize, R: Serialize> {
    pub command: &'static str,
    pub params: P,
    pub results: R,
    pub seed: Option<u64>,
    pub version: &'static str,
}

/// Result of a command: its report as JSON, a human summary and the exit code.
pub struct Outcome {
    pub json: serde_json::Value,
    pub summary: String,
    pub code: u8,
}

pub fn report<P: Serialize, R: Serialize>(command: &'static str, params: P, results: R, seed: Option<u64>) -> serde_json::Value {
    serde_json::to_value(RunReport {
        command,
        params,
        results,
        seed,
        version: env!("CARGO_PKG_VERSION"),
    })
    .expect("reports serialize")
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EnumerationTooLarge { .. } | Error::SearchInfeasible(_) => EXIT_INFEASIBLE,
            Error::SchemeAxiomViolation(_) | Error::FormulaMismatch { .. } => EXIT_FAILED,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(value) = std::env::var("QGRASS_THREADS") {
        let threads: usize = value
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Failure::usage(format!("QGRASS_THREADS must be a positive integer, got {value:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Gauss(a) => commands::gauss(a),
        Command::Enumerate { scheme, output } => commands::enumerate(scheme, output),
        Command::Scheme(a) => commands::scheme(a),
        Command::Family(a) => commands::family(a),
        Command::Bound(a) => commands::bound(a),
        Command::Quotient(a) => commands::quotient(a),
        Command::Cross(a) => commands::cross(a),
        Command::Search(a) => commands::search(a),
        Command::Chromatic(a) => commands::chromatic(a),
        Command::Certify(a) => commands::certify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.json).expect("json");
            // a closed stdout (e.g. piped into `head`) is not an error of the run
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            eprintln!("{}", out.summary);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
