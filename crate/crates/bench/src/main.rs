//! `bench insert ...` and `bench trace ...`: timing tables as CSV or TSV.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybrid_sparse::bench::{
    self, BenchResult, InsertConfig, InsertOrder, InsertVariant, OutputFormat, TraceConfig,
    TraceMode,
};
use hybrid_sparse::SparseError;

const SCALE_VAR: &str = "BENCH_PAPER_SCALE";

#[derive(Parser, Debug)]
#[command(
    name = "bench",
    version,
    about = "Sparse matrix insertion and trace(A.t()*B) timings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a square matrix by per-element insertion.
    Insert {
        #[command(flatten)]
        common: Common,
        /// Storage backend; all of them when omitted.
        #[arg(long)]
        variant: Vec<InsertVariant>,
        #[arg(long, default_value = "random")]
        order: InsertOrder,
    },
    /// Evaluate trace(A.t() * B) for two random matrices.
    Trace {
        #[command(flatten)]
        common: Common,
        /// Evaluation strategy; both when omitted.
        #[arg(long)]
        mode: Vec<TraceMode>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Rows and columns; 2000 by default, 10000 with BENCH_PAPER_SCALE=1.
    #[arg(long)]
    size: Option<usize>,
    /// Fraction of nonzero elements; may repeat. Defaults to the standard sweep.
    #[arg(long)]
    density: Vec<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = bench::DEFAULT_REPS)]
    reps: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    fmt: OutputFormat,
}

fn full_scale() -> bool {
    std::env::var(SCALE_VAR).is_ok_and(|v| v == "1")
}

impl Common {
    fn size(&self) -> usize {
        self.size.unwrap_or(if full_scale() {
            bench::FULL_SIZE
        } else {
            bench::DESK_SIZE
        })
    }

    fn densities(&self) -> Vec<f64> {
        if !self.density.is_empty() {
            self.density.clone()
        } else if full_scale() {
            bench::FULL_DENSITIES.to_vec()
        } else {
            bench::DESK_DENSITIES.to_vec()
        }
    }
}

fn or_all<T: Copy>(chosen: &[T], all: &[T]) -> Vec<T> {
    if chosen.is_empty() {
        all.to_vec()
    } else {
        chosen.to_vec()
    }
}

fn run(command: &Command) -> Result<(Vec<BenchResult>, &Common), SparseError> {
    let mut results = Vec::new();
    match command {
        Command::Insert {
            common,
            variant,
            order,
        } => {
            for density in common.densities() {
                for &v in &or_all(variant, InsertVariant::ALL) {
                    let report = bench::bench_insert(&InsertConfig {
                        size: common.size(),
                        density,
                        variant: v,
                        order: *order,
                        seed: common.seed,
                        reps: common.reps,
                    })?;
                    results.push(report.result);
                    results.extend(report.conversion);
                }
            }
            Ok((results, common))
        }
        Command::Trace { common, mode } => {
            for density in common.densities() {
                for &m in &or_all(mode, TraceMode::ALL) {
                    let report = bench::bench_trace(&TraceConfig {
                        size: common.size(),
                        density,
                        mode: m,
                        seed: common.seed,
                        reps: common.reps,
                    })?;
                    results.push(report.result);
                }
            }
            Ok((results, common))
        }
    }
}

fn write_results(results: &[BenchResult], common: &Common) -> Result<(), SparseError> {
    match &common.out {
        Some(path) => bench::emit(results, io::BufWriter::new(File::create(path)?), common.fmt),
        None => bench::emit(results, io::stdout().lock(), common.fmt),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = run(&cli.command).and_then(|(results, common)| write_results(&results, common));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(io::stderr(), "bench: {e}");
            match e {
                SparseError::Correctness(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
