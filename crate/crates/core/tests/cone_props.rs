mod common;

use common::*;
use copw_core::cone::{
    check_necessary, decompose, hoffman_pereira, horn, is_copositive, project_simplex, verify_split,
    CopositivityVerdict, DecompositionResult, SplitTolerance, DEFAULT_DECOMPOSE_MAX_ITER, DEFAULT_DECOMPOSE_TOL,
};
use copw_core::matrix::RealSymMatrix;
use proptest::prelude::*;
use rand::Rng;

/// Minimum of `xᵀHx` over the simplex grid `{k/n : Σk = n}` in four variables.
fn grid_min(h: &RealSymMatrix, n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..=n {
        for b in 0..=(n - a) {
            for c in 0..=(n - a - b) {
                let e = n - a - b - c;
                let x = [a, b, c, e].map(|k| k as f64 / n as f64);
                best = best.min(h.quadratic_form(&x));
            }
        }
    }
    best
}

#[test]
fn exact_test_agrees_with_simplex_grid() {
    // n = 82 gives C(85, 3) = 98 770 grid points.
    let mut r = rng(11);
    let mut violations = 0;
    for _ in 0..40 {
        let h = RealSymMatrix::from_fn(4, |i, j| {
            if i == j {
                r.gen_range(0.0..1.0)
            } else {
                r.gen_range(-0.6..1.0)
            }
        });
        let g = grid_min(&h, 82);
        let exact = is_copositive(&h).unwrap();
        if g < 0.0 {
            violations += 1;
            assert!(!exact.is_copositive(), "grid found a violation the exact test missed");
        }
        if exact.is_copositive() {
            assert!(g >= -1e-12);
        }
    }
    assert!(violations > 0, "the sample should contain non-copositive matrices");
}

#[test]
fn certificates_verify_by_direct_evaluation() {
    let mut r = rng(12);
    let mut seen = 0;
    for _ in 0..200 {
        let d = r.gen_range(2..=7);
        let h = random_sym(&mut r, d);
        if let CopositivityVerdict::NotCopositive(v) = is_copositive(&h).unwrap() {
            seen += 1;
            assert!(v.x.iter().all(|&x| x >= 0.0));
            let norm2: f64 = v.x.iter().map(|x| x * x).sum();
            let direct = h.quadratic_form(&v.x);
            assert_eq!(direct, v.value);
            assert!(direct < -1e-12 * h.frobenius_norm() * norm2);
        }
    }
    assert!(seen > 100);
}

#[test]
fn necessary_conditions_hold_for_copositive_inputs() {
    let mut r = rng(13);
    for _ in 0..100 {
        let d = r.gen_range(2..=6);
        let h = random_copositive(&mut r, d);
        assert!(check_necessary(&h).ok);
        assert!(is_copositive(&h).unwrap().is_copositive());
    }
}

#[test]
fn psd_plus_nonnegative_always_splits() {
    let mut r = rng(14);
    for _ in 0..300 {
        let d = r.gen_range(2..=4);
        let h = random_copositive(&mut r, d);
        match decompose(&h, DEFAULT_DECOMPOSE_TOL, DEFAULT_DECOMPOSE_MAX_ITER).unwrap() {
            DecompositionResult::Split { psd, nonneg, .. } => {
                assert!(verify_split(&h, &psd, &nonneg, SplitTolerance::default()).unwrap().ok);
            }
            other => panic!("no split for a PSD + N matrix: {other:?}"),
        }
    }
}

#[test]
fn extreme_exceptional_matrices_do_not_split() {
    for h in [horn(5).unwrap(), hoffman_pereira()] {
        assert!(h.min_eigenvalue().unwrap() < 0.0);
        assert!(h.min_entry() < 0.0);
        assert!(is_copositive(&h).unwrap().is_copositive());
        match decompose(&h, DEFAULT_DECOMPOSE_TOL, DEFAULT_DECOMPOSE_MAX_ITER).unwrap() {
            DecompositionResult::Exceptional { residual, iterations } => {
                assert!(residual > DEFAULT_DECOMPOSE_TOL);
                assert_eq!(iterations, DEFAULT_DECOMPOSE_MAX_ITER);
            }
            other => panic!("unexpected split {other:?}"),
        }
    }
}

#[test]
fn larger_horn_matrices_stay_copositive() {
    for d in [7, 9] {
        let h = horn(d).unwrap();
        assert!(is_copositive(&h).unwrap().is_copositive());
        // Adjacent pair support: x = e_0 + e_1 gives exactly zero.
        let mut x = vec![0.0; d];
        x[0] = 1.0;
        x[1] = 1.0;
        assert_eq!(h.quadratic_form(&x), 0.0);
    }
}

#[test]
fn printed_split_of_the_3x3_example_verifies() {
    let h = d3_paper_matrix();
    let psd = RealSymMatrix::from_rows(&[vec![0.0, 0.0, 0.0], vec![0.0, 1.0, -1.0], vec![0.0, -1.0, 1.0]]).unwrap();
    let n = RealSymMatrix::from_rows(&[vec![1.0, 1.0, 1.0], vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
    let check = verify_split(&h, &psd, &n, SplitTolerance::default()).unwrap();
    assert!(check.ok);
    assert_eq!(check.sum_error, 0.0);

    let bad = verify_split(&h, &n, &psd, SplitTolerance::default()).unwrap();
    assert!(!bad.ok);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simplex_projection_lands_on_the_simplex(v in prop::collection::vec(-5.0f64..5.0, 1..8)) {
        let x = project_simplex(&v);
        prop_assert!(x.iter().all(|&t| t >= 0.0));
        prop_assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonnegative_matrices_are_copositive(entries in prop::collection::vec(0.0f64..2.0, 15)) {
        let h = sym_from_upper(5, &entries);
        prop_assert!(check_necessary(&h).ok);
        prop_assert!(is_copositive(&h).unwrap().is_copositive());
    }
}
