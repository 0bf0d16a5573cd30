//! `opscale` command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opscale::exact_linalg::NumericMode;

use report::{CliError, Report};

#[derive(Parser, Debug)]
#[command(name = "opscale", version, about = "Operator scaling: singularity, nc-rank, capacity and identity testing")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Arithmetic: exact, exact-capped:<bits> or float.
    #[arg(long, global = true, value_parser = parse_mode)]
    pub mode: Option<NumericMode>,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cross-check the answer with a brute-force oracle.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report wall time (on stderr for text output, as `wall_time_ms` in JSON).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Classical,
    Quantum,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether an operator is rank non-decreasing (its pencil is full).
    Singular { input: PathBuf },
    /// Non-commutative rank of a pencil or of a symbolic matrix.
    Ncrank {
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Approximate the capacity.
    Capacity {
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Exact rational arithmetic with the certified truncation rule.
        #[arg(long)]
        certified: bool,
    },
    /// Run a fixed number of scaling steps and write the trace.
    Scale {
        input: PathBuf,
        #[arg(long)]
        iters: u64,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Decide permanent positivity by Sinkhorn scaling.
    Matscale { input: PathBuf },
    /// Decide whether a rational formula is identically zero.
    Rit {
        #[arg(long)]
        formula: String,
    },
}

fn parse_mode(text: &str) -> Result<NumericMode, String> {
    NumericMode::parse(text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let g = &cli.global;
    let result: Result<Report, CliError> = match &cli.command {
        Command::Singular { input } => commands::singular(input, g),
        Command::Ncrank { input, method } => commands::ncrank(input, *method, g),
        Command::Capacity { input, eps, certified } => commands::capacity(input, *eps, *certified, g),
        Command::Scale { input, iters, trace } => commands::scale(input, *iters, trace.as_deref(), g),
        Command::Matscale { input } => commands::matscale(input, g),
        Command::Rit { formula } => commands::rit(formula, g),
    };
    let elapsed = start.elapsed();
    match result {
        Ok(mut report) => {
            report.args = argv;
            if g.timing {
                report.wall_time_ms = Some(elapsed.as_secs_f64() * 1e3);
            }
            if g.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
                if g.timing {
                    eprintln!("wall time: {:.3} s", elapsed.as_secs_f64());
                }
            }
            ExitCode::from(report.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
