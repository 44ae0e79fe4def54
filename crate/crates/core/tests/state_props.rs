mod common;

use std::collections::BTreeMap;

use common::*;
use copw_core::certify::{
    certify_state, classify_witness, corollary_family, corollary_state, ds_separable_lowdim, ppt, Verdict,
    DEFAULT_DETECTION_TOL,
};
use copw_core::matrix::{eigh, is_psd, numerical_rank, C64};
use copw_core::symmetric::{
    build_ds, build_symmetric, edge_candidate, m_matrix, partial_transpose, sym_projector, CoherenceMap,
    DsProbabilities,
};
use copw_core::witness::{project_sym, witness, Classification};
use rand::Rng;

fn block_law(p: &DsProbabilities) -> Vec<f64> {
    let mut v = m_matrix(p).eigh().unwrap().eigenvalues;
    let d = p.d();
    for i in 0..d {
        for j in (i + 1)..d {
            v.push(p.get(i, j) / 2.0);
            v.push(p.get(i, j) / 2.0);
        }
    }
    v
}

#[test]
fn partial_transpose_spectrum_follows_block_law() {
    let mut r = rng(21);
    for _ in 0..150 {
        let d = r.gen_range(1..=6);
        let p = random_weights(&mut r, d);
        let got = eigh(&build_ds(&p).partial_transpose()).unwrap().eigenvalues;
        assert!(multiset_close(got, block_law(&p), 1e-9));
    }
}

#[test]
fn ppt_routes_agree_on_diagonal_symmetric_states() {
    let mut r = rng(22);
    for _ in 0..200 {
        let d = r.gen_range(2..=5);
        let p = if r.gen_bool(0.5) { random_ppt_weights(&mut r, d) } else { random_weights(&mut r, d) };
        let m_psd = is_psd(&m_matrix(&p).to_hermitian(), DEFAULT_DETECTION_TOL).unwrap().verdict;
        let dense = ppt(&build_ds(&p)).unwrap().ppt;
        assert_eq!(m_psd, dense);
        if d <= 4 {
            let v = ds_separable_lowdim(&p).unwrap();
            assert_eq!(v == Verdict::SeparableProved, dense);
        }
    }
}

#[test]
fn symmetric_states_are_projector_invariant_and_pt_is_an_involution() {
    let mut r = rng(23);
    for _ in 0..40 {
        let d = r.gen_range(2..=4);
        let p = random_weights(&mut r, d);
        let mut c = CoherenceMap::new(d);
        c.insert((0, 0), (1, 1), C64::new(r.gen_range(-0.05..0.05), r.gen_range(-0.05..0.05)))
            .unwrap();
        c.insert((0, 1), (d - 1, d - 1), C64::new(0.02, 0.0)).unwrap();
        let s = build_symmetric(&p, &c).unwrap();
        let pi = sym_projector(d).unwrap();
        let sandwich = pi.as_matrix() * s.rho().as_matrix() * pi.as_matrix();
        assert!((sandwich - s.rho().as_matrix()).norm() < 1e-10);
        let twice = partial_transpose(&s.partial_transpose(), d);
        assert!(twice.distance(s.rho()) < 1e-15);
        assert!((s.partial_transpose().trace() - s.trace()).abs() < 1e-14);
    }
}

#[test]
fn corollary_rule_matches_dense_partial_transpose() {
    let mut r = rng(24);
    let mut both = [0usize; 2];
    for k in 0..200 {
        let d = if k % 2 == 0 { 3 } else { 4 };
        let p = random_ppt_weights(&mut r, d);
        let mut alphas = BTreeMap::new();
        for i in 0..d {
            for j in (i + 1)..d {
                if r.gen_bool(0.4) {
                    // Radius in [0.5, 1.5] times the bound, so both sides appear.
                    let rad = r.gen_range(0.5..1.5) * p.get(i, j) / 2.0;
                    let phase: f64 = r.gen_range(0.0..std::f64::consts::TAU);
                    alphas.insert((i, j), C64::from_polar(rad, phase));
                }
            }
        }
        let w = witness(&random_sym(&mut r, d));
        let out = corollary_family(&p, &alphas, &w).unwrap();
        let dense = ppt(&corollary_state(&p, &alphas).unwrap()).unwrap().ppt;
        assert_eq!(out.ppt, dense, "d={d} alphas={alphas:?}");
        both[out.ppt as usize] += 1;
    }
    assert!(both[0] > 20 && both[1] > 20, "{both:?}");
}

#[test]
fn edge_candidates_have_ranks_five_and_seven() {
    let mut r = rng(25);
    let mut done = 0;
    while done < 60 {
        let mut p = DsProbabilities::new(3).unwrap();
        for i in 0..3 {
            for j in i..3 {
                p.set(i, j, r.gen_range(0.05..1.0)).unwrap();
            }
        }
        let slack = p.get(0, 1) * p.get(1, 2) - 2.0 * p.get(0, 2) * p.get(1, 1);
        if slack < 0.01 {
            assert!(edge_candidate(&p).is_err() || slack >= 0.0);
            continue;
        }
        let s = edge_candidate(&p.normalized().unwrap()).unwrap();
        assert_eq!(numerical_rank(s.rho(), 1e-8).unwrap(), 5);
        assert_eq!(numerical_rank(&s.partial_transpose(), 1e-8).unwrap(), 7);
        done += 1;
    }
}

#[test]
fn low_dimensional_states_are_never_ppt_entangled() {
    let mut r = rng(26);
    for _ in 0..100 {
        let d = r.gen_range(2..=4);
        let h = random_copositive(&mut r, d);
        let w = classify_witness(&witness(&h)).unwrap();
        assert_eq!(w.classification(), Classification::Decomposable);
        let p = random_ppt_weights(&mut r, d);
        let (rep, _) = certify_state(&build_ds(&p), &project_sym(&w), DEFAULT_DETECTION_TOL).unwrap();
        assert_ne!(rep.verdict, Verdict::PptEntangled);
        // A PPT DS state in d <= 4 is separable, so no witness goes negative on it.
        assert!(rep.witness_value.unwrap() > -1e-9);
    }
}
