//! `summa`: batch front end for the operator-ideal toolkit.
//!
//! Exit status is 0 on success, 1 on bad input, 2 when `suite` finds a failing criterion.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use summa_core::Exponent;

#[derive(Debug, Parser)]
#[command(name = "summa", version, about = "Operator-ideal norms on finite-dimensional l_p spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand; all are recorded in the report.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Master seed. The SUMMA_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Monte Carlo samples.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: usize,
    /// Restarts for witness searches and multistart ascent.
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,
    /// Ascent stopping tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MatrixArgs {
    /// Matrix file: JSON {"rows","cols","data"} (row-major) or CSV.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value = "2")]
    pub domain: Exponent,
    #[arg(long, default_value = "2")]
    pub codomain: Exponent,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    /// Family file: JSON {"space": {"dim", "p"}, "vectors": [[...], ...]}.
    #[arg(long)]
    pub family: PathBuf,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Hilbert-Schmidt norm of a matrix on l_2.
    Hs {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// p -> q operator norm.
    Opnorm {
        #[command(flatten)]
        m: MatrixArgs,
        /// Also report a certified upper bound.
        #[arg(long)]
        upper: bool,
    },
    /// Weak l_p norm of a family.
    Weaknorm {
        #[command(flatten)]
        f: FamilyArgs,
        #[arg(long, default_value = "2")]
        p: Exponent,
    },
    /// Exact Rademacher moment of a family.
    Radmoment {
        #[command(flatten)]
        f: FamilyArgs,
        #[arg(long, default_value_t = 2.0)]
        moment_p: f64,
    },
    /// Gaussian moment of a family.
    Gaussmoment {
        #[command(flatten)]
        f: FamilyArgs,
        #[arg(long, default_value_t = 2.0)]
        moment_p: f64,
    },
    /// Bounds on the 2-summing norm.
    Pi2 {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        upper: bool,
        #[arg(long)]
        lower: bool,
    },
    /// Lower bound on the 1-summing norm.
    #[command(name = "pi1-lb")]
    #[serde(rename = "pi1-lb")]
    Pi1Lb {
        #[command(flatten)]
        m: MatrixArgs,
    },
    /// Lower bound on the gamma-summing norm.
    Gamma {
        #[command(flatten)]
        m: MatrixArgs,
    },
    /// Pietsch certificate and factorization.
    Pietsch {
        #[command(flatten)]
        m: MatrixArgs,
    },
    /// Weak*-1-nuclear representation of a matrix on l_2.
    Nuclear {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// l_inf -> l_1 norm and its Hilbertian relaxation.
    Grothendieck {
        #[arg(long)]
        matrix: PathBuf,
        /// Report the ratio with its sanity bound.
        #[arg(long)]
        ratio: bool,
    },
    /// Classify a diagonal operator l_p -> l_q with sigma_n = scale * n^-alpha.
    DiagClassify {
        #[command(flatten)]
        d: DiagArgs,
    },
    /// Growth of gamma-norms of diagonal truncations.
    DiagGrowth {
        #[command(flatten)]
        d: DiagArgs,
        /// Comma-separated increasing dimensions.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16, 32, 64])]
        dims: Vec<usize>,
    },
    /// Lower bound on a cotype-q constant.
    Cotype {
        #[command(flatten)]
        s: SpaceArgs,
        #[arg(long, default_value = "2")]
        q: Exponent,
    },
    /// Lower bound on a type-p constant.
    Type {
        #[command(flatten)]
        s: SpaceArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Pre-Hilbert-Schmidt lower bound at truncation (k, m).
    Phs {
        #[command(flatten)]
        mat: MatrixArgs,
        /// Domain-side truncation; defaults to the domain dimension.
        #[arg(long)]
        k: Option<usize>,
        /// Codomain-side truncation; defaults to the codomain dimension.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 64)]
        draws: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Run the acceptance suite.
    Suite {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiagArgs {
    #[arg(long)]
    pub p: Exponent,
    #[arg(long)]
    pub q: Exponent,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaceArgs {
    /// Exponent of the host space l_s^dim.
    #[arg(long)]
    pub space: Exponent,
    #[arg(long)]
    pub dim: usize,
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    if let Ok(s) = std::env::var("SUMMA_SEED") {
        match s.trim().parse() {
            Ok(seed) => cli.global.seed = seed,
            Err(_) => {
                eprintln!("error: SUMMA_SEED must be an unsigned integer, got {s:?}");
                return ExitCode::from(1);
            }
        }
    }
    match commands::run(&cli.global, &cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(if out.failed { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
