//! Timing harness for element insertion and `trace(A.t() * B)`.
//!
//! Each run is preceded by one untimed warm-up. The insertion schedule and
//! the random operands are generated before the clock starts, and every
//! timed output is checked against a reference before its time is
//! reported; a mismatch aborts the whole benchmark.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coo::CooData;
use crate::csc::{CscData, DupPolicy, OversizedCsc};
use crate::dims::{Dims, Triplet};
use crate::error::{Result, SparseError};
use crate::expr::Expr;
use crate::hybrid::{Format, SpMat};
use crate::ops::generate::{open_unit, sample_positions, target_nnz};
use crate::ops::{self, sprandu};
use crate::rbt::{decode_index, encode_index, RbtStats, RbtStore};

pub const DESK_SIZE: usize = 2_000;
pub const FULL_SIZE: usize = 10_000;
pub const DESK_DENSITIES: [f64; 3] = [0.0001, 0.001, 0.01];
pub const FULL_DENSITIES: [f64; 4] = [0.0001, 0.001, 0.01, 0.1];
pub const DEFAULT_REPS: usize = 3;

/// Largest element count a single benchmark matrix may hold.
pub const MAX_BENCH_NNZ: usize = 1 << 28;

/// Relative tolerance between fused and materialised trace results.
pub const TRACE_RTOL: f64 = 1e-10;

pub const CSV_HEADER: [&str; 8] = [
    "experiment",
    "variant",
    "n_rows",
    "n_cols",
    "density",
    "seconds",
    "seed",
    "reps",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Insert,
    Trace,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Insert => "insert",
            Experiment::Trace => "trace",
        }
    }
}

macro_rules! named_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($ty::$variant => $name),+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    _ => Err(format!(
                        "unknown {} `{s}`; expected one of: {}",
                        stringify!($ty),
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
    };
}

/// Storage backend used to build the matrix element by element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertVariant {
    CscNaive,
    CscOversized,
    Coo,
    Rbt,
    /// Tree build followed by conversion to CSC.
    Hybrid,
}

named_enum!(InsertVariant {
    CscNaive => "csc_naive",
    CscOversized => "csc_oversized",
    Coo => "coo",
    Rbt => "rbt",
    Hybrid => "hybrid",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOrder {
    Random,
    /// Strictly increasing column-major positions.
    QuasiOrdered,
}

named_enum!(InsertOrder {
    Random => "random",
    QuasiOrdered => "quasi_ordered",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Fused,
    Materialized,
}

named_enum!(TraceMode {
    Fused => "fused",
    Materialized => "materialized",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Tsv,
}

named_enum!(OutputFormat {
    Csv => "csv",
    Tsv => "tsv",
});

impl OutputFormat {
    fn separator(&self) -> char {
        match self {
            OutputFormat::Csv => ',',
            OutputFormat::Tsv => '\t',
        }
    }
}

/// One emitted row: the median wall-clock time of `repetitions` runs.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub experiment: Experiment,
    pub variant: String,
    pub n_rows: usize,
    pub n_cols: usize,
    pub density: f64,
    pub seconds: f64,
    pub seed: u64,
    pub repetitions: usize,
}

pub fn median(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "median of no samples");
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn check_config(size: usize, density: f64, reps: usize) -> Result<(Dims, usize)> {
    if reps == 0 {
        return Err(SparseError::Domain("repetitions must be at least 1".into()));
    }
    if size == 0 {
        return Err(SparseError::Resource("matrix size must be positive".into()));
    }
    let dims = Dims::new(size, size).map_err(|e| SparseError::Resource(e.to_string()))?;
    let nnz = target_nnz(dims, density)?;
    if nnz > MAX_BENCH_NNZ {
        return Err(SparseError::Resource(format!(
            "{nnz} elements exceed the limit of {MAX_BENCH_NNZ}"
        )));
    }
    Ok((dims, nnz))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertConfig {
    pub size: usize,
    pub density: f64,
    pub variant: InsertVariant,
    pub order: InsertOrder,
    pub seed: u64,
    pub reps: usize,
}

#[derive(Debug, Clone)]
pub struct InsertReport {
    pub result: BenchResult,
    /// Hybrid only: median of the tree build alone.
    pub build_seconds: f64,
    /// Hybrid only: median of the tree-to-CSC conversion, as its own row.
    pub conversion: Option<BenchResult>,
    /// Tree insert counters from the last run, for `rbt` and `hybrid`.
    pub rbt_stats: Option<RbtStats>,
    /// The matrix built by the last run.
    pub matrix: CscData,
}

/// The elements to insert, in insertion order. Positions are distinct and
/// the set depends only on `size`, `density` and `seed`; `order` only
/// permutes it.
pub fn insertion_schedule(
    dims: Dims,
    nnz: usize,
    order: InsertOrder,
    seed: u64,
) -> Result<Vec<Triplet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = sample_positions(&mut rng, dims.n_elem()?, nnz);
    let mut schedule: Vec<Triplet> = positions
        .iter()
        .map(|&k| {
            let (r, c) = decode_index(k, dims.n_rows);
            Triplet::new(r, c, open_unit(&mut rng))
        })
        .collect();
    if order == InsertOrder::Random {
        schedule.shuffle(&mut rng);
    }
    Ok(schedule)
}

struct Built {
    matrix: CscData,
    build: f64,
    convert: f64,
    stats: Option<RbtStats>,
}

fn build_once(
    dims: Dims,
    schedule: &[Triplet],
    variant: InsertVariant,
    order: InsertOrder,
) -> Result<Built> {
    let start = Instant::now();
    let mut convert = 0.0;
    let mut stats = None;
    let matrix = match variant {
        InsertVariant::CscNaive => {
            let mut m = CscData::empty(dims);
            for &t in schedule {
                m.insert_naive(t)?;
            }
            m
        }
        InsertVariant::CscOversized => {
            let mut m = OversizedCsc::with_capacity(dims, 0);
            for &t in schedule {
                m.insert(t)?;
            }
            m.into_csc()
        }
        InsertVariant::Coo => {
            let mut m = CooData::with_capacity(dims, 0);
            for &t in schedule {
                m.insert(t)?;
            }
            let elapsed = start.elapsed().as_secs_f64();
            let out = m.to_csc()?;
            return Ok(Built {
                matrix: out,
                build: elapsed,
                convert,
                stats,
            });
        }
        InsertVariant::Rbt => {
            let mut tree = RbtStore::new(dims)?;
            for t in schedule {
                let k = encode_index(t.row, t.col, dims.n_rows);
                match order {
                    InsertOrder::QuasiOrdered => tree.append_max(k, t.value)?,
                    InsertOrder::Random => tree.insert(k, t.value)?,
                }
            }
            let elapsed = start.elapsed().as_secs_f64();
            stats = Some(tree.stats());
            return Ok(Built {
                matrix: tree.to_csc(),
                build: elapsed,
                convert,
                stats,
            });
        }
        InsertVariant::Hybrid => {
            let mut m = SpMat::new(dims.n_rows, dims.n_cols)?;
            for t in schedule {
                m.set(t.row, t.col, t.value)?;
            }
            let built = Instant::now();
            m.require(Format::Csc);
            convert = built.elapsed().as_secs_f64();
            stats = m.rbt_stats();
            let build = (built - start).as_secs_f64();
            return Ok(Built {
                matrix: m.into_csc(),
                build,
                convert,
                stats,
            });
        }
    };
    Ok(Built {
        build: start.elapsed().as_secs_f64(),
        matrix,
        convert,
        stats,
    })
}

/// Times element-by-element construction of a `size x size` matrix.
pub fn bench_insert(cfg: &InsertConfig) -> Result<InsertReport> {
    let (dims, nnz) = check_config(cfg.size, cfg.density, cfg.reps)?;
    let schedule = insertion_schedule(dims, nnz, cfg.order, cfg.seed)?;
    let expected = CscData::from_triplets(dims, &schedule, DupPolicy::LastWins)?;

    let verify = |b: &Built| -> Result<()> {
        if b.matrix == expected {
            Ok(())
        } else {
            Err(SparseError::Correctness(format!(
                "{} build differs from the reference ({} vs {} elements)",
                cfg.variant,
                b.matrix.nnz(),
                expected.nnz()
            )))
        }
    };

    verify(&build_once(dims, &schedule, cfg.variant, cfg.order)?)?;
    let mut totals = Vec::with_capacity(cfg.reps);
    let mut builds = Vec::with_capacity(cfg.reps);
    let mut converts = Vec::with_capacity(cfg.reps);
    let mut last = None;
    for _ in 0..cfg.reps {
        let b = build_once(dims, &schedule, cfg.variant, cfg.order)?;
        verify(&b)?;
        totals.push(b.build + b.convert);
        builds.push(b.build);
        converts.push(b.convert);
        last = Some(b);
    }
    let last = last.expect("reps >= 1");

    let row = |variant: String, seconds: f64| BenchResult {
        experiment: Experiment::Insert,
        variant,
        n_rows: dims.n_rows,
        n_cols: dims.n_cols,
        density: cfg.density,
        seconds,
        seed: cfg.seed,
        repetitions: cfg.reps,
    };
    let conversion = (cfg.variant == InsertVariant::Hybrid)
        .then(|| row("hybrid_conversion".to_string(), median(&converts)));
    Ok(InsertReport {
        result: row(cfg.variant.to_string(), median(&totals)),
        build_seconds: median(&builds),
        conversion,
        rbt_stats: last.stats,
        matrix: last.matrix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig {
    pub size: usize,
    pub density: f64,
    pub mode: TraceMode,
    pub seed: u64,
    pub reps: usize,
}

#[derive(Debug, Clone)]
pub struct TraceReport {
    pub result: BenchResult,
    pub value: f64,
    /// Intermediate matrices formed per evaluation in the timed mode.
    pub temporaries: usize,
}

/// Seed of the second operand, derived from the first.
fn second_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

fn trace_once(a: &SpMat, b: &SpMat, mode: TraceMode) -> Result<(f64, usize)> {
    match mode {
        TraceMode::Fused => {
            let (v, stats) = (Expr::from(a).t() * Expr::from(b))
                .trace()
                .evaluate_with_stats()?;
            Ok((v.as_scalar().expect("trace is scalar"), stats.temporaries))
        }
        TraceMode::Materialized => {
            let at = ops::transpose(a);
            let prod = ops::spgemm(&at, b)?;
            Ok((ops::trace(&prod), 2))
        }
    }
}

pub fn traces_agree(x: f64, y: f64) -> bool {
    (x - y).abs() <= TRACE_RTOL * x.abs().max(y.abs()) || x == y
}

/// Times `trace(A.t() * B)` for two random matrices.
pub fn bench_trace(cfg: &TraceConfig) -> Result<TraceReport> {
    let (dims, _) = check_config(cfg.size, cfg.density, cfg.reps)?;
    let a = sprandu(dims.n_rows, dims.n_cols, cfg.density, cfg.seed)?;
    let b = sprandu(dims.n_rows, dims.n_cols, cfg.density, second_seed(cfg.seed))?;
    a.require(Format::Csc);
    b.require(Format::Csc);

    let (fused, _) = trace_once(&a, &b, TraceMode::Fused)?;
    let (full, _) = trace_once(&a, &b, TraceMode::Materialized)?;
    if !traces_agree(fused, full) {
        return Err(SparseError::Correctness(format!(
            "fused trace {fused:e} disagrees with materialised trace {full:e}"
        )));
    }
    let reference = full;

    let mut times = Vec::with_capacity(cfg.reps);
    let mut temporaries = 0;
    let mut value = reference;
    for _ in 0..cfg.reps {
        let start = Instant::now();
        let (v, temps) = trace_once(&a, &b, cfg.mode)?;
        times.push(start.elapsed().as_secs_f64());
        if !traces_agree(v, reference) {
            return Err(SparseError::Correctness(format!(
                "{} trace {v:e} disagrees with reference {reference:e}",
                cfg.mode
            )));
        }
        temporaries = temps;
        value = v;
    }
    Ok(TraceReport {
        result: BenchResult {
            experiment: Experiment::Trace,
            variant: cfg.mode.to_string(),
            n_rows: dims.n_rows,
            n_cols: dims.n_cols,
            density: cfg.density,
            seconds: median(&times),
            seed: cfg.seed,
            repetitions: cfg.reps,
        },
        value,
        temporaries,
    })
}

/// Writes a header line and one line per result, in the given order.
pub fn emit<W: Write>(results: &[BenchResult], mut sink: W, fmt: OutputFormat) -> Result<()> {
    let sep = fmt.separator().to_string();
    writeln!(sink, "{}", CSV_HEADER.join(&sep))?;
    for r in results {
        writeln!(
            sink,
            "{}",
            [
                r.experiment.as_str().to_string(),
                r.variant.clone(),
                r.n_rows.to_string(),
                r.n_cols.to_string(),
                r.density.to_string(),
                r.seconds.to_string(),
                r.seed.to_string(),
                r.repetitions.to_string(),
            ]
            .join(&sep)
        )?;
    }
    sink.flush()?;
    Ok(())
}

/// Reads back what [`emit`] wrote.
pub fn parse_results<R: BufRead>(source: R, fmt: OutputFormat) -> Result<Vec<BenchResult>> {
    let sep = fmt.separator();
    let mut lines = source.lines().enumerate().map(|(k, l)| (k + 1, l));
    let bad = |line: usize, msg: String| SparseError::Format { line, msg };
    match lines.next() {
        Some((_, Ok(h))) if h.split(sep).eq(CSV_HEADER) => {}
        Some((_, Err(e))) => return Err(e.into()),
        _ => return Err(bad(1, "missing or wrong header".into())),
    }
    let mut out = Vec::new();
    for (no, line) in lines {
        let line = line?;
        let f: Vec<&str> = line.split(sep).collect();
        if f.len() != CSV_HEADER.len() {
            return Err(bad(
                no,
                format!("expected {} fields, got {}", CSV_HEADER.len(), f.len()),
            ));
        }
        let num = |k: usize| -> Result<f64> {
            f[k].parse()
                .map_err(|_| bad(no, format!("bad number `{}`", f[k])))
        };
        let int = |k: usize| -> Result<u64> {
            f[k].parse()
                .map_err(|_| bad(no, format!("bad integer `{}`", f[k])))
        };
        let experiment = match f[0] {
            "insert" => Experiment::Insert,
            "trace" => Experiment::Trace,
            other => return Err(bad(no, format!("unknown experiment `{other}`"))),
        };
        out.push(BenchResult {
            experiment,
            variant: f[1].to_string(),
            n_rows: int(2)? as usize,
            n_cols: int(3)? as usize,
            density: num(4)?,
            seconds: num(5)?,
            seed: int(6)?,
            repetitions: int(7)? as usize,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_odd_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn schedule_orders_share_elements() {
        let dims = Dims::new(50, 50).unwrap();
        let a = insertion_schedule(dims, 100, InsertOrder::Random, 9).unwrap();
        let b = insertion_schedule(dims, 100, InsertOrder::QuasiOrdered, 9).unwrap();
        let key = |t: &Triplet| encode_index(t.row, t.col, 50);
        assert!(b.windows(2).all(|w| key(&w[0]) < key(&w[1])));
        let mut a_sorted = a.clone();
        a_sorted.sort_by_key(key);
        assert_eq!(a_sorted, b);
        assert_ne!(a, b);
    }

    #[test]
    fn infeasible_configs() {
        let cfg = |size, density| InsertConfig {
            size,
            density,
            variant: InsertVariant::Rbt,
            order: InsertOrder::Random,
            seed: 1,
            reps: 1,
        };
        assert!(matches!(
            bench_insert(&cfg(0, 0.1)),
            Err(SparseError::Resource(_))
        ));
        assert!(matches!(
            bench_insert(&cfg(1 << 20, 0.5)),
            Err(SparseError::Resource(_))
        ));
        assert!(matches!(
            bench_insert(&cfg(10, 1.5)),
            Err(SparseError::Domain(_))
        ));
    }

    #[test]
    fn names_parse() {
        for v in InsertVariant::ALL {
            assert_eq!(v.as_str().parse::<InsertVariant>().unwrap(), *v);
        }
        assert!("bogus".parse::<TraceMode>().is_err());
    }
}
