use hybrid_sparse::bench::{
    bench_insert, bench_trace, emit, parse_results, BenchResult, Experiment, InsertConfig,
    InsertOrder, InsertVariant, OutputFormat, TraceConfig, TraceMode, CSV_HEADER,
};

fn insert(variant: InsertVariant, order: InsertOrder) -> hybrid_sparse::bench::InsertReport {
    bench_insert(&InsertConfig {
        size: 500,
        density: 0.01,
        variant,
        order,
        seed: 3,
        reps: 1,
    })
    .unwrap()
}

#[test]
fn all_insert_variants_build_the_same_matrix() {
    for order in InsertOrder::ALL {
        let reports: Vec<_> = InsertVariant::ALL
            .iter()
            .map(|&v| insert(v, *order))
            .collect();
        let first = &reports[0].matrix;
        assert_eq!(first.nnz(), 2_500);
        for r in &reports {
            assert_eq!(&r.matrix, first, "{} / {order}", r.result.variant);
            assert!(r.result.seconds >= 0.0);
        }
    }
}

#[test]
fn quasi_ordered_tree_build_only_appends() {
    for variant in [InsertVariant::Rbt, InsertVariant::Hybrid] {
        let stats = insert(variant, InsertOrder::QuasiOrdered)
            .rbt_stats
            .unwrap();
        assert_eq!((stats.appended, stats.searched), (2_500, 0), "{variant}");
    }
    let stats = insert(InsertVariant::Rbt, InsertOrder::Random)
        .rbt_stats
        .unwrap();
    assert!(stats.searched > 0);
}

#[test]
fn hybrid_reports_conversion_separately() {
    let r = insert(InsertVariant::Hybrid, InsertOrder::Random);
    let conv = r.conversion.unwrap();
    assert_eq!(conv.variant, "hybrid_conversion");
    assert!(conv.seconds <= r.result.seconds);
    assert!(insert(InsertVariant::Rbt, InsertOrder::Random)
        .conversion
        .is_none());
}

#[test]
fn trace_modes_agree_at_every_density() {
    for density in [0.0001, 0.001, 0.01, 0.1] {
        let run = |mode| {
            bench_trace(&TraceConfig {
                size: 500,
                density,
                mode,
                seed: 4,
                reps: 1,
            })
            .unwrap()
        };
        let (fused, full) = (run(TraceMode::Fused), run(TraceMode::Materialized));
        let tol = 1e-10 * fused.value.abs().max(full.value.abs());
        assert!((fused.value - full.value).abs() <= tol, "density {density}");
        assert_eq!(fused.temporaries, 0);
        assert!(full.temporaries > 0);
    }
}

fn sample_results() -> Vec<BenchResult> {
    vec![
        BenchResult {
            experiment: Experiment::Insert,
            variant: "rbt".into(),
            n_rows: 2000,
            n_cols: 2000,
            density: 0.001,
            seconds: 0.1 + 0.2,
            seed: u64::MAX,
            repetitions: 3,
        },
        BenchResult {
            experiment: Experiment::Trace,
            variant: "fused".into(),
            n_rows: 10,
            n_cols: 10,
            density: 1e-4,
            seconds: 1.5e-7,
            seed: 0,
            repetitions: 5,
        },
    ]
}

#[test]
fn emit_header_only_for_no_results() {
    let mut out = Vec::new();
    emit(&[], &mut out, OutputFormat::Csv).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "experiment,variant,n_rows,n_cols,density,seconds,seed,reps\n"
    );
}

#[test]
fn emit_round_trips_in_both_formats() {
    let results = sample_results();
    for fmt in OutputFormat::ALL {
        let mut out = Vec::new();
        emit(&results, &mut out, *fmt).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        let sep = if *fmt == OutputFormat::Csv { ',' } else { '\t' };
        assert!(text
            .lines()
            .all(|l| l.split(sep).count() == CSV_HEADER.len()));
        assert_eq!(parse_results(out.as_slice(), *fmt).unwrap(), results);
    }
}
