//! `rmt-tails`: command-line frontend.
//!
//! CSV output goes to stdout, or to `--out FILE` together with a JSON
//! manifest `FILE.manifest.json` from which `replay` regenerates the file.

mod commands;
mod grid;
mod manifest;

use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grid::Grid;
use rmt_tails::Error;

/// Exit codes.
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_MODEL: u8 = 3;
pub const EXIT_PRECISION: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "rmt-tails",
    version,
    about = "Largest-eigenvalue tails and gap probabilities for polynomial matrix models",
    after_help = "Grids are given as lo:hi:count or lo:hi:count:log (geometric spacing, lo > 0).\n\
                  Exit codes: 0 ok, 2 usage, 3 model violation (multi-cut), 4 precision failure."
)]
pub struct Cli {
    /// Decimal digits for internal arithmetic.
    #[arg(long, global = true, env = "RMT_PRECISION", default_value_t = 16)]
    precision: u32,

    /// Write CSV to this file (plus a manifest) instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Multicritical,
}

#[derive(Clone, Debug, Args)]
pub struct PotentialArgs {
    /// Potential family (ignored when --coeffs is given).
    #[arg(long, value_enum, default_value = "gaussian")]
    family: FamilyArg,
    /// Order of multicriticality.
    #[arg(long, allow_negative_numbers = true, required_if_eq("family", "multicritical"))]
    k: Option<i64>,
    /// Coefficients of V from x^0 upwards, e.g. "0,0,1/2" (fractions and decimals).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "k")]
    coeffs: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coefficients, critical points and Sturm root count.
    Potential {
        #[command(flatten)]
        pot: PotentialArgs,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// One-cut solution: support, density, spectral curve, effective potential.
    Spectral {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long)]
        t: f64,
        /// x grid; default covers the support with a quarter-width margin.
        #[arg(long, allow_hyphen_values = true)]
        x_grid: Option<Grid>,
    },
    /// Left (order N^2) or right (order N) tail on a z grid.
    Tails {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        z_grid: Grid,
        /// Matrix size; adds log P with prefactor on the right side.
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Finite-N log gap probabilities from orthogonal polynomials.
    Gap {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long)]
        t: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        z_grid: Grid,
    },
    /// Metropolis samples of the eigenvalue gas.
    Sample {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long)]
        t: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        sweeps: usize,
        #[arg(long)]
        seed: u64,
        /// Hard wall: all eigenvalues stay below it.
        #[arg(long, allow_negative_numbers = true)]
        wall: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        burn_in: usize,
        #[arg(long, default_value_t = 1)]
        thin: usize,
        /// Independent chains (seed ^ chain index), concatenated.
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Run self-check suites.
    Verify {
        /// Suite name; all suites when omitted.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Re-run the command recorded in a manifest and compare digests.
    Replay {
        manifest: std::path::PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
    /// Checks ran but did not pass.
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "I/O: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(Error::Domain(_) | Error::Input(_) | Error::EndpointIsRoot(_)) => EXIT_USAGE,
            CliError::Core(Error::OneCutViolated(_)) => EXIT_MODEL,
            CliError::Core(Error::Precision { .. }) => EXIT_PRECISION,
            _ => EXIT_FAILURE,
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    match commands::run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            if let CliError::Core(Error::Precision { .. }) = e {
                eprintln!("hint: rerun with a larger --precision (or RMT_PRECISION)");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
