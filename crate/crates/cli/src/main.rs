//! `snewton`: power series solutions of polynomial homotopies from the command line.

mod commands;
mod report;
mod series_json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use snewton::Tolerances;

#[derive(Parser, Debug)]
#[command(name = "snewton", version, about = "Newton's method on truncated power series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Relative singular value threshold for rank decisions.
    #[arg(long, default_value_t = 1e-10)]
    tol_rank: f64,
    /// Largest residual accepted for a start point.
    #[arg(long, default_value_t = 1e-8)]
    tol_residual: f64,
    /// Series coefficients below this (relative) count as zero.
    #[arg(long, default_value_t = 1e-10)]
    tol_series: f64,
}

impl Common {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rank: self.tol_rank,
            residual: self.tol_residual,
            series: self.tol_series,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the start point (regular, singular, or empty start fibre).
    Classify {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run Newton's method from every start in the file.
    Solve {
        file: PathBuf,
        /// Truncation degree of the reported series.
        #[arg(long, default_value_t = 8)]
        degree: i64,
        #[arg(long, default_value_t = 16)]
        max_steps: usize,
        /// Include the block matrix of the first step of each run.
        #[arg(long)]
        dump_blocks: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Padé approximant [L/M] of each solution component, or of `--series`.
    Pade {
        l: usize,
        m: usize,
        file: Option<PathBuf>,
        /// A power series in t given directly, e.g. `1 - 0.75*t + 1.21875*t^2`.
        #[arg(long, conflicts_with = "file")]
        series: Option<String>,
        /// Solve to this degree (at least L+M) before approximating.
        #[arg(long)]
        degree: Option<i64>,
        #[arg(long, default_value_t = 16)]
        max_steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Residual order of the starts in the file, or of series from `solve --json`.
    Residual {
        file: PathBuf,
        #[arg(long)]
        series_json: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Report text plus exit status; failures may still carry a partial report.
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NUMERIC: u8 = 2;

/// Which exit status an error maps to.
pub fn exit_code(e: &snewton::Error) -> u8 {
    use snewton::Error::*;
    match e {
        Syntax { .. }
        | UnknownVariable(_)
        | DimensionMismatch(_)
        | IndexOutOfRange { .. }
        | NonUnimodular(_)
        | EmptyMatrix
        | NotOnVariety(_)
        | Input(_) => EXIT_INPUT,
        _ => EXIT_NUMERIC,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Classify { file, common } => commands::classify(&file, &common),
        Command::Solve {
            file,
            degree,
            max_steps,
            dump_blocks,
            common,
        } => commands::solve(&file, degree, max_steps, dump_blocks, &common),
        Command::Pade {
            l,
            m,
            file,
            series,
            degree,
            max_steps,
            common,
        } => commands::pade(l, m, file.as_deref(), series.as_deref(), degree, max_steps, &common),
        Command::Residual {
            file,
            series_json,
            common,
        } => commands::residual(&file, series_json.as_deref(), &common),
    };
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("snewton: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
