//! `lucas-tau`: solve, sweep and verify the shifted Lucas wavelet tau method.

mod commands;
mod expr;
mod problem_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lucas-tau", version, about = "Shifted Lucas wavelet tau solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem and print its coefficients and errors.
    Solve(SolveArgs),
    /// Solve over a grid of (k, S) and emit a CSV error table.
    Sweep(SweepArgs),
    /// Run every invariant suite.
    Verify(VerifyArgs),
    /// Print the differentiation matrix and, with --alpha, the stretch matrix.
    DumpMatrices(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Args)]
struct Common {
    /// Built-in problem (lane-emden-1, pantograph-2) or a problem file.
    #[arg(long)]
    problem: String,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 50)]
    max_iter: usize,
    /// Gauss-Chebyshev nodes; defaults to max(64, 8S).
    #[arg(long = "quad-order")]
    quad_order: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long = "S")]
    s: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma list or inclusive range, e.g. `0,1` or `0..2`.
    #[arg(long, default_value = "0")]
    k: String,
    /// Comma list or inclusive range, e.g. `3,4,5` or `3..8`.
    #[arg(long = "S")]
    s: String,
    /// Write 0 in the runtime column so output is reproducible.
    #[arg(long = "no-timing")]
    no_timing: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Override the quadrature order of the basis suites (no minimum).
    #[arg(long = "quad-order")]
    quad_order: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long = "S")]
    s: usize,
    /// Also print the stretch matrix for this delay factor.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "quad-order")]
    quad_order: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::DumpMatrices(a) => commands::dump_matrices(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
