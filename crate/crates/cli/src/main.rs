//! `glpos`: batch front end for decompositions, kappa-image reports,
//! matrix coefficient estimates and positivity scans.
//!
//! Reports go to stdout and are reproducible for fixed flags and seed; timing
//! and diagnostics go to stderr.

mod commands;
mod error;
mod io;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use glpos::Tolerances;

use commands::{CoefficientArgs, Mode};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "glpos",
    version,
    about = "Principal matrix coefficients of GL_n(R)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolFlags {
    #[arg(long, default_value_t = 1e-10)]
    ortho_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    minor_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    eig_tol: f64,
    #[arg(long, default_value_t = 50)]
    max_sweeps: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Iwasawa (g = n a k) or Cartan (g = k p) factors of a matrix.
    Decompose {
        #[arg(long, value_enum)]
        mode: Mode,
        /// JSON file `{"n": .., "rows": [[..], ..]}`.
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Membership of Haar samples in kappa(exp p0), with explicit preimages.
    KappaImage {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Write the CSV here; the summary then goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of psi(x) for delta_r and real nu.
    Coefficient {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Comma-separated exponents, e.g. `0.3,-0.3`.
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also estimate the operator phi(x).
        #[arg(long)]
        operator: bool,
        /// Compare with O(2) quadrature (n = 2 only).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
    },
    /// psi for every r at random x in exp(p0) and random real nu.
    PositivityScan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here; the summary then goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs a tabular command: CSV and summary share stdout only when the CSV
/// has a file of its own.
fn tabular(
    out: Option<PathBuf>,
    f: impl FnOnce(&mut dyn Write, Option<&std::path::Path>) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match out.as_deref() {
        Some(path) => f(&mut std::io::stdout().lock(), Some(path)),
        None => f(&mut std::io::stderr().lock(), None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Decompose { mode, matrix, tol } => {
            let tol = Tolerances {
                ortho_tol: tol.ortho_tol,
                minor_tol: tol.minor_tol,
                eig_tol: tol.eig_tol,
                max_sweeps: tol.max_sweeps,
            };
            commands::decompose(&mut stdout, mode, &matrix, &tol)
        }
        Command::KappaImage {
            n,
            samples,
            seed,
            out,
        } => {
            drop(stdout);
            tabular(out, |w, p| commands::kappa_image(w, n, samples, seed, p))
        }
        Command::Coefficient {
            n,
            r,
            nu,
            matrix,
            samples,
            seed,
            operator,
            oracle,
            nodes,
        } => commands::coefficient(
            &mut stdout,
            &CoefficientArgs {
                n,
                r,
                nu: &nu,
                matrix: &matrix,
                samples,
                seed,
                operator,
                oracle,
                nodes,
            },
        ),
        Command::PositivityScan {
            n,
            trials,
            samples,
            seed,
            out,
        } => {
            drop(stdout);
            tabular(out, |w, p| commands::scan(w, n, trials, samples, seed, p))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(cli);
    eprintln!("elapsed_ms: {}", start.elapsed().as_millis());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
