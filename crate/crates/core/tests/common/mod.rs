#![allow(dead_code)]

use copw_core::matrix::{RealSymMatrix, C64};
use copw_core::symmetric::DsProbabilities;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sym(r: &mut impl Rng, d: usize) -> RealSymMatrix {
    RealSymMatrix::from_fn(d, |_, _| r.gen_range(-2.0..2.0))
}

/// `B Bᵀ` with `B` of random width, so rank-deficient parts show up too.
pub fn random_psd(r: &mut impl Rng, d: usize) -> RealSymMatrix {
    let k = r.gen_range(1..=d);
    let b: Vec<Vec<f64>> = (0..d).map(|_| (0..k).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
    RealSymMatrix::from_fn(d, |i, j| (0..k).map(|c| b[i][c] * b[j][c]).sum())
}

/// Entrywise nonnegative with some exact zeros.
pub fn random_nonneg(r: &mut impl Rng, d: usize) -> RealSymMatrix {
    RealSymMatrix::from_fn(d, |_, _| if r.gen_bool(0.3) { 0.0 } else { r.gen_range(0.0..1.5) })
}

pub fn random_copositive(r: &mut impl Rng, d: usize) -> RealSymMatrix {
    &random_psd(r, d) + &random_nonneg(r, d)
}

/// Normalized weights with roughly a quarter of them zero.
pub fn random_weights(r: &mut impl Rng, d: usize) -> DsProbabilities {
    let mut p = DsProbabilities::new(d).unwrap();
    for i in 0..d {
        for j in i..d {
            if r.gen_bool(0.75) {
                p.set(i, j, r.gen_range(0.0..1.0)).unwrap();
            }
        }
    }
    if p.total() == 0.0 {
        p.set(0, 0, 1.0).unwrap();
    }
    p.normalized().unwrap()
}

/// Weights whose `M_d` is strictly diagonally dominant, hence PSD.
pub fn random_ppt_weights(r: &mut impl Rng, d: usize) -> DsProbabilities {
    let mut p = DsProbabilities::new(d).unwrap();
    let mut row = vec![0.0; d];
    for i in 0..d {
        for j in (i + 1)..d {
            let w = r.gen_range(0.05..1.0);
            p.set(i, j, w).unwrap();
            row[i] += w / 2.0;
            row[j] += w / 2.0;
        }
    }
    for (i, off) in row.into_iter().enumerate() {
        p.set(i, i, off + r.gen_range(0.05..0.5)).unwrap();
    }
    p.normalized().unwrap()
}

pub fn random_unit(r: &mut impl Rng, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d)
        .map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / n).collect()
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

pub fn multiset_close(a: Vec<f64>, b: Vec<f64>, tol: f64) -> bool {
    a.len() == b.len() && sorted(a).iter().zip(sorted(b).iter()).all(|(x, y)| (x - y).abs() <= tol)
}

pub fn d3_paper_matrix() -> RealSymMatrix {
    RealSymMatrix::from_rows(&[vec![1.0, 1.0, 1.0], vec![1.0, 1.0, -1.0], vec![1.0, -1.0, 1.0]]).unwrap()
}

/// Symmetric matrix from its upper triangle listed row by row.
pub fn sym_from_upper(d: usize, upper: &[f64]) -> RealSymMatrix {
    assert_eq!(upper.len(), d * (d + 1) / 2);
    RealSymMatrix::from_fn(d, |i, j| {
        let (a, b) = (i.min(j), i.max(j));
        upper[a * d - a * (a + 1) / 2 + b]
    })
}
