mod converge;
mod gallery;
mod output;
mod simulate;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit status and message of a failed run.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const INVALID: u8 = 2;
    pub const NOT_CONVERGED: u8 = 3;
    pub const TRUNCATED: u8 = 4;

    pub fn invalid(message: impl Into<String>) -> Self {
        Failure { code: Self::INVALID, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

#[derive(Parser)]
#[command(name = "inflap", version, about = "Infinity-Laplace equations on graphs: solve, simulate, converge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InitArg {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    Jacobi,
    GaussSeidel,
}

#[derive(Subcommand)]
enum Command {
    /// Solve `Δ∞u = f` on X, `u = g` on Y from a problem JSON file.
    Solve {
        problem: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = InitArg::Upper)]
        init: InitArg,
        #[arg(long, value_enum, default_value_t = SchemeArg::Jacobi)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1_000_000)]
        max_iters: usize,
        /// Also solve from the lower barrier and report the gap.
        #[arg(long)]
        probe_uniqueness: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo estimate of a tug-of-war game value.
    Simulate {
        game: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ε-graph convergence study on a Euclidean domain.
    Converge {
        domain: PathBuf,
        /// Comma-separated, strictly decreasing.
        #[arg(long, value_delimiter = ',')]
        eps_schedule: Option<Vec<f64>>,
        /// `g` (the boundary data is the exact solution), `none`, inline
        /// field JSON or a path to a field JSON file.
        #[arg(long)]
        exact: Option<String>,
        #[arg(long, default_value_t = inflap::euclid::DEFAULT_MAX_SAMPLES)]
        max_samples: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a gallery example: sign-change, doubling, comb, cca, nonexistence.
    Gallery {
        name: String,
        /// `key=value` pairs, comma-separated (e.g. `c=2,teeth=100`).
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { problem, tol, init, scheme, max_iters, probe_uniqueness, out } => {
            solve::run(&problem, solve::Args { tol, init, scheme, max_iters, probe_uniqueness }, out.as_ref())
        }
        Command::Simulate { game, n, seed, out } => simulate::run(&game, n, seed, out.as_ref()),
        Command::Converge { domain, eps_schedule, exact, max_samples, tol, out } => {
            converge::run(&domain, eps_schedule, exact.as_deref(), max_samples, tol, out.as_ref())
        }
        Command::Gallery { name, params, out } => gallery::run(&name, &params, out.as_ref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
