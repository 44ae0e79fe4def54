//! Copositivity, PSD + nonnegative splitting, and the exceptional families.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{psd_project, RealSymMatrix};

/// Largest dimension handled by the exhaustive principal-submatrix sweep.
pub const MAX_EXACT_DIM: usize = 16;

/// Eigenvector components above this count as strictly positive.
const POSITIVE_COMPONENT: f64 = 1e-12;

/// Relative margin below zero for an eigenvalue (or certificate value) to
/// count as negative.
const NEGATIVE_MARGIN: f64 = 1e-12;

const POLISH_STEPS: usize = 200;

pub const DEFAULT_DECOMPOSE_TOL: f64 = 1e-7;
pub const DEFAULT_DECOMPOSE_MAX_ITER: usize = 50_000;

/// How often the splitting loop runs the (eigendecomposition-backed)
/// feasibility check.
const FEASIBILITY_STRIDE: usize = 10;

/// Violations of the two-by-two necessary conditions for copositivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NecessaryCheck {
    pub ok: bool,
    pub violation: Option<(usize, usize)>,
}

/// `H_ii ≥ 0` and `√(H_ii H_jj) ≥ −H_ij` for every pair.
pub fn check_necessary(h: &RealSymMatrix) -> NecessaryCheck {
    let n = h.dim();
    for i in 0..n {
        if h.get(i, i) < 0.0 {
            return NecessaryCheck {
                ok: false,
                violation: Some((i, i)),
            };
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let hij = h.get(i, j);
            if hij < 0.0 && (h.get(i, i) * h.get(j, j)).sqrt() < -hij {
                return NecessaryCheck {
                    ok: false,
                    violation: Some((i, j)),
                };
            }
        }
    }
    NecessaryCheck {
        ok: true,
        violation: None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Componentwise nonnegative, on the unit simplex.
    pub x: Vec<f64>,
    /// `xᵀ H x < 0`.
    pub value: f64,
    /// Principal submatrix whose eigenvector seeded the certificate.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CopositivityVerdict {
    Copositive,
    NotCopositive(Violation),
}

impl CopositivityVerdict {
    pub fn is_copositive(&self) -> bool {
        matches!(self, CopositivityVerdict::Copositive)
    }
}

/// Exact copositivity test: `H` is copositive iff no principal submatrix has
/// a strictly positive eigenvector with a negative eigenvalue.
///
/// Sweeps all `2^d − 1` principal submatrices, smallest first, and reports
/// the first violation found as a polished simplex certificate.
pub fn is_copositive(h: &RealSymMatrix) -> Result<CopositivityVerdict> {
    let n = h.dim();
    if n > MAX_EXACT_DIM {
        return Err(Error::UnsupportedScale(format!(
            "exact copositivity is limited to d <= {MAX_EXACT_DIM} (got {n}); \
             use check_necessary together with simplex sampling instead"
        )));
    }
    let threshold = -NEGATIVE_MARGIN * h.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));

    let found = masks
        .par_iter()
        .map(|&mask| -> Result<Option<(Vec<usize>, Vec<f64>)>> {
            let idx: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
            let sub = h.principal_submatrix(&idx);
            let spec = sub.eigh()?;
            for (c, &lam) in spec.eigenvalues.iter().enumerate() {
                if lam >= threshold {
                    break;
                }
                let col: Vec<f64> = spec.eigenvectors.column(c).iter().copied().collect();
                let sign = if col[0] < 0.0 { -1.0 } else { 1.0 };
                if col.iter().all(|&v| sign * v > POSITIVE_COMPONENT) {
                    return Ok(Some((idx, col.iter().map(|v| sign * v).collect())));
                }
            }
            Ok(None)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });

    match found {
        None => Ok(CopositivityVerdict::Copositive),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
        Some(Ok(Some((support, vec)))) => {
            let mut x = vec![0.0; n];
            for (&k, &v) in support.iter().zip(vec.iter()) {
                x[k] = v;
            }
            Ok(CopositivityVerdict::NotCopositive(certify(h, x, support)))
        }
    }
}

fn certify(h: &RealSymMatrix, seed: Vec<f64>, support: Vec<usize>) -> Violation {
    let x = polish(h, project_simplex(&seed));
    let value = h.quadratic_form(&x);
    Violation { x, value, support }
}

/// Projected gradient descent on the unit simplex, keeping the best iterate.
fn polish(h: &RealSymMatrix, start: Vec<f64>) -> Vec<f64> {
    let step = 1.0 / h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut best_val = h.quadratic_form(&start);
    let mut best = start.clone();
    let mut x = start;
    let m = h.as_matrix();
    for _ in 0..POLISH_STEPS {
        let grad: Vec<f64> = (0..x.len())
            .map(|i| 2.0 * (0..x.len()).map(|j| m[(i, j)] * x[j]).sum::<f64>())
            .collect();
        let moved: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
        x = project_simplex(&moved);
        let val = h.quadratic_form(&x);
        if val < best_val {
            best_val = val;
            best = x.clone();
        }
    }
    best
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}` (sort-based).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k as f64 + 1.0);
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecompositionResult {
    /// `H = psd + nonneg`.
    Split {
        psd: RealSymMatrix,
        nonneg: RealSymMatrix,
        iterations: usize,
    },
    /// No split found; `residual` is the final distance between the PSD
    /// iterate and the set `{X ≤ H}`.
    Exceptional { residual: f64, iterations: usize },
}

impl DecompositionResult {
    pub fn is_split(&self) -> bool {
        matches!(self, DecompositionResult::Split { .. })
    }
}

/// Bounds a split must satisfy to be accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitTolerance {
    pub sum: f64,
    pub psd: f64,
    pub nonneg: f64,
}

impl Default for SplitTolerance {
    fn default() -> Self {
        Self {
            sum: 1e-7,
            psd: 1e-7,
            nonneg: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCheck {
    pub sum_error: f64,
    pub psd_min_eig: f64,
    pub nonneg_min_entry: f64,
    pub ok: bool,
}

/// Re-verifies a claimed `H = psd + nonneg` split from scratch.
pub fn verify_split(
    h: &RealSymMatrix,
    psd: &RealSymMatrix,
    nonneg: &RealSymMatrix,
    tol: SplitTolerance,
) -> Result<SplitCheck> {
    if psd.dim() != h.dim() || nonneg.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psd.dim().max(nonneg.dim()),
        });
    }
    let sum_error = (&(psd + nonneg) - h).frobenius_norm();
    let psd_min_eig = psd.min_eigenvalue()?;
    let nonneg_min_entry = nonneg.min_entry();
    Ok(SplitCheck {
        sum_error,
        psd_min_eig,
        nonneg_min_entry,
        ok: sum_error <= tol.sum && psd_min_eig >= -tol.psd && nonneg_min_entry >= -tol.nonneg,
    })
}

/// Looks for `X ⪰ 0` with `X ≤ H` entrywise by Douglas–Rachford splitting
/// between the PSD cone and the upper-bound set, started from `H`.
///
/// Each step clips the governing iterate `z` to `B = min(z, H)`, projects the
/// reflection `2B − z` onto the PSD cone to get `A`, and corrects
/// `z ← z + A − B`. A candidate is accepted as soon as `min(A, H)` has
/// smallest eigenvalue at least `-tol`; then `H − X` is exactly nonnegative.
/// Exhausting `max_iter` yields [`DecompositionResult::Exceptional`], a
/// numerical verdict only, with residual `‖max(A − H, 0)‖_F`.
///
/// Plain Dykstra alternation converges sublinearly when the feasible set has
/// no PSD-interior point (already for the standard 3×3 copositive example),
/// which is why the reflected scheme is used.
pub fn decompose(h: &RealSymMatrix, tol: f64, max_iter: usize) -> Result<DecompositionResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let mut z = h.clone();
    let mut residual = f64::INFINITY;

    for iter in 0..max_iter {
        let b = z.entrywise_min(h);
        let a = psd_project(&(&b.scale(2.0) - &z))?;
        z = &(&z + &a) - &b;

        if iter % FEASIBILITY_STRIDE == 0 || iter + 1 == max_iter {
            let candidate = a.entrywise_min(h);
            residual = (&a - &candidate).frobenius_norm();
            if candidate.min_eigenvalue()? >= -tol {
                let nonneg = h - &candidate;
                return Ok(DecompositionResult::Split {
                    psd: candidate,
                    nonneg,
                    iterations: iter + 1,
                });
            }
        }
    }
    Ok(DecompositionResult::Exceptional {
        residual,
        iterations: max_iter,
    })
}

/// Horn-type matrix for odd `d ≥ 5`: unit diagonal, `−1` on the cyclic
/// first off-diagonal band, `+1` elsewhere.
pub fn horn(d: usize) -> Result<RealSymMatrix> {
    if d < 5 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "Horn matrices need odd d >= 5, got {d}"
        )));
    }
    Ok(RealSymMatrix::from_fn(d, |i, j| {
        let gap = (j + d - i) % d;
        if gap == 0 {
            1.0
        } else if gap == 1 || gap == d - 1 {
            -1.0
        } else {
            1.0
        }
    }))
}

/// The 7×7 Hoffman–Pereira matrix, circulant with first row
/// `(1, −1, 1, 0, 0, 1, −1)`.
pub fn hoffman_pereira() -> RealSymMatrix {
    const ROW: [f64; 7] = [1.0, -1.0, 1.0, 0.0, 0.0, 1.0, -1.0];
    RealSymMatrix::from_fn(7, |i, j| ROW[(j + 7 - i) % 7])
}
