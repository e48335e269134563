mod common;

use common::{random_matrix, Dense};
use hybrid_sparse::{fused_trace_at_b, ops, Expr, SpMat, SparseError, Triplet, Value};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diag(v: &[f64]) -> SpMat {
    let t: Vec<Triplet> = v
        .iter()
        .enumerate()
        .map(|(i, &x)| Triplet::new(i, i, x))
        .collect();
    SpMat::from_triplets(v.len(), v.len(), &t).unwrap()
}

#[test]
fn trace_of_transposed_product_fuses() {
    let (a, b) = (diag(&[1.0, 2.0]), diag(&[3.0, 4.0]));
    let e = (Expr::from(&a).t() * Expr::from(&b)).trace();
    let r = e.rewrite();
    assert_eq!(r.kind(), "fused_trace_at_b");
    assert_eq!(r.count_nodes("mul"), 0);
    assert_eq!(r.count_nodes("transpose"), 0);
    let (v, stats) = e.evaluate_with_stats().unwrap();
    assert_eq!(v, Value::Scalar(11.0));
    assert_eq!(stats.temporaries, 0);
    assert_eq!(fused_trace_at_b(&a, &b).unwrap(), 11.0);
}

#[test]
fn fused_matches_naive_on_random_operands() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, m) in [(30, 30), (40, 25), (7, 33)] {
        let (a, _) = random_matrix(&mut rng, n, m, 0.2);
        let (b, _) = random_matrix(&mut rng, n, m, 0.2);
        let e = (Expr::from(&a).t() * Expr::from(&b)).trace();
        let fused = e.evaluate().unwrap().as_scalar().unwrap();
        let (naive, naive_stats) = e.evaluate_naive().unwrap();
        let naive = naive.as_scalar().unwrap();
        assert!((fused - naive).abs() <= 1e-12 * naive.abs().max(1.0));
        assert_eq!(naive_stats.temporaries, 2);
    }
    let (a, b) = (ops::speye(3, 4).unwrap(), ops::speye(4, 3).unwrap());
    assert!(matches!(
        fused_trace_at_b(&a, &b),
        Err(SparseError::Shape { .. })
    ));
}

#[test]
fn scaled_sum_times_transpose_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (a, da) = random_matrix(&mut rng, 20, 15, 0.2);
    let (b, db) = random_matrix(&mut rng, 20, 15, 0.2);
    let (c, dc) = random_matrix(&mut rng, 10, 15, 0.2);
    let e = 0.5 * (Expr::from(&a) + Expr::from(&b)) * Expr::from(&c).t();
    let got = e.evaluate().unwrap().into_matrix().unwrap();
    let want = da
        .add_scaled(&db, 1.0, 1.0)
        .scale(0.5)
        .matmul(&dc.transpose());
    common::check_matrix(&got, &want).unwrap();
}

#[test]
fn rewrite_rules() {
    let a = ops::sprandu(6, 6, 0.5, 3).unwrap();
    let b = ops::sprandu(6, 6, 0.5, 4).unwrap();

    let double = Expr::from(&a).t().t();
    assert!(double.rewrite().same_structure(&Expr::from(&a)));

    let nested = Expr::from(&a).scale(2.0).scale(3.0);
    let r = nested.rewrite();
    assert_eq!(r.count_nodes("scalar_mul"), 1);
    assert!(r.same_structure(&Expr::from(&a).scale(6.0)));

    let scaled_sum = (Expr::from(&a) - Expr::from(&b)).scale(2.0);
    let (v, stats) = scaled_sum.evaluate_with_stats().unwrap();
    let (w, naive) = scaled_sum.evaluate_naive().unwrap();
    assert_eq!(stats.temporaries, 0);
    assert_eq!(naive.temporaries, 1);
    let want = Dense::of(&a).add_scaled(&Dense::of(&b), 2.0, -2.0);
    common::check_matrix(&v.into_matrix().unwrap(), &want).unwrap();
    common::check_matrix(&w.into_matrix().unwrap(), &want).unwrap();

    for e in [double, nested, scaled_sum] {
        let once = e.rewrite();
        assert!(once.rewrite().same_structure(&once));
    }
}

#[test]
fn shape_errors_surface_before_evaluation() {
    let a = ops::speye(3, 4).unwrap();
    let b = ops::speye(3, 4).unwrap();
    let bad = Expr::from(&a) * Expr::from(&b);
    assert!(matches!(bad.shape_of(), Err(SparseError::Shape { .. })));
    assert!(bad.evaluate().is_err());
    assert!(bad.evaluate_naive().is_err());
    let ok = Expr::from(&a).t() * Expr::from(&b);
    assert_eq!(ok.shape_of().unwrap().n_rows, 4);
}
