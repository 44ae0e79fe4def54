//! Dense real-symmetric and complex-Hermitian matrices.
//!
//! Both types check their symmetry on construction and then store an exactly
//! symmetrized copy, so every downstream routine may rely on
//! `m[(i, j)] == conj(m[(j, i)])` bit-for-bit.

use std::fmt;
use std::ops::{Add, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Default relative tolerance for positive-semidefiniteness checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Relative asymmetry accepted (and then averaged away) at construction.
const SYMMETRY_TOL: f64 = 1e-12;

fn sweep_cap(dim: usize) -> usize {
    200 * dim.max(4)
}

#[derive(Clone, PartialEq)]
pub struct RealSymMatrix {
    data: DMatrix<f64>,
}

impl RealSymMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                row: 0,
                cols: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut data = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (data[(i, j)], data[(j, i)]);
                let scale = 1f64.max(a.abs()).max(b.abs());
                if (a - b).abs().is_nan() || (a - b).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { i, j, a, b });
                }
                let avg = 0.5 * (a + b);
                data[(i, j)] = avg;
                data[(j, i)] = avg;
            }
        }
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    row,
                    cols: r.len(),
                });
            }
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Builds a symmetric matrix from the upper triangle of `f`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim > 0, "RealSymMatrix needs dim >= 1");
        let mut data = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| 0.0)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.data.row(i).iter().copied().collect())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `xᵀ H x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim());
        let v = DVector::from_column_slice(x);
        v.dot(&(&self.data * &v))
    }

    /// `Tr(A B)`, which for symmetric operands is the entrywise inner product.
    pub fn trace_product(&self, other: &RealSymMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data.dot(&other.data)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: &self.data * s,
        }
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        Self {
            data: DMatrix::from_fn(k, k, |a, b| self.data[(idx[a], idx[b])]),
        }
    }

    /// Entrywise minimum with `other`.
    pub fn entrywise_min(&self, other: &RealSymMatrix) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            data: self.data.zip_map(&other.data, f64::min),
        }
    }

    pub fn to_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix {
            data: self.data.map(|x| C64::new(x, 0.0)),
        }
    }

    pub fn eigh(&self) -> Result<RealSpectrum> {
        let n = self.dim();
        let cap = sweep_cap(n);
        let eig = SymmetricEigen::try_new(self.data.clone(), f64::EPSILON, cap)
            .ok_or(Error::NoConvergence { dim: n, max_iter: cap })?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
        Ok(RealSpectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.eigenvalues[0])
    }
}

impl fmt::Debug for RealSymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealSymMatrix")
            .field("dim", &self.dim())
            .field("rows", &self.rows())
            .finish()
    }
}

impl Add for &RealSymMatrix {
    type Output = RealSymMatrix;
    fn add(self, rhs: &RealSymMatrix) -> RealSymMatrix {
        RealSymMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &RealSymMatrix {
    type Output = RealSymMatrix;
    fn sub(self, rhs: &RealSymMatrix) -> RealSymMatrix {
        RealSymMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<C64>,
}

impl HermitianMatrix {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                row: 0,
                cols: m.ncols(),
            });
        }
        let n = m.nrows();
        let scale = 1f64.max(m.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let mut data = m;
        for i in 0..n {
            for j in i..n {
                let (a, b) = (data[(i, j)], data[(j, i)].conj());
                let deviation = (a - b).norm();
                if deviation.is_nan() || deviation > SYMMETRY_TOL * scale {
                    return Err(Error::NotHermitian { i, j, deviation });
                }
                let avg = (a + b) * 0.5;
                data[(i, j)] = avg;
                data[(j, i)] = avg.conj();
            }
        }
        Ok(Self { data })
    }

    /// Real and imaginary parts given as separate row-major grids.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let n = re.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let check = |rows: &[Vec<f64>]| -> Result<()> {
            if rows.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: rows.len(),
                });
            }
            for (row, r) in rows.iter().enumerate() {
                if r.len() != n {
                    return Err(Error::NotSquare {
                        rows: n,
                        row,
                        cols: r.len(),
                    });
                }
            }
            Ok(())
        };
        check(re)?;
        if let Some(im) = im {
            check(im)?;
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| {
            C64::new(re[i][j], im.map_or(0.0, |im| im[i][j]))
        }))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "HermitianMatrix needs dim >= 1");
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "HermitianMatrix needs dim >= 1");
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &DVector<C64>) -> Self {
        Self {
            data: v * v.adjoint(),
        }
    }

    /// Wraps a matrix the caller has already built Hermitian (e.g. `A + A†`).
    pub(crate) fn from_trusted(data: DMatrix<C64>) -> Self {
        debug_assert!(data.is_square());
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn real_part(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.data[(i, j)].re).collect())
            .collect()
    }

    pub fn imag_part(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.data[(i, j)].im).collect())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.data.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Tr(A B)`; real for Hermitian operands up to rounding.
    pub fn trace_product(&self, other: &HermitianMatrix) -> C64 {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.data[(i, k)] * other.data[(k, i)];
            }
        }
        acc
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &DVector<C64>) -> C64 {
        v.dotc(&(&self.data * v))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: self.data.map(|z| z * s),
        }
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> Self {
        let data = u * &self.data * u.adjoint();
        let mut out = Self { data };
        out.resymmetrize();
        out
    }

    pub(crate) fn resymmetrize(&mut self) {
        let n = self.dim();
        for i in 0..n {
            self.data[(i, i)].im = 0.0;
            for j in (i + 1)..n {
                let avg = (self.data[(i, j)] + self.data[(j, i)].conj()) * 0.5;
                self.data[(i, j)] = avg;
                self.data[(j, i)] = avg.conj();
            }
        }
    }

    pub fn distance(&self, other: &HermitianMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        (&self.data - &other.data)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianMatrix")
            .field("dim", &self.dim())
            .finish_non_exhaustive()
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let v = &self.eigenvectors;
        let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, c| {
            v[(i, c)] * self.eigenvalues[c]
        });
        scaled * v.adjoint()
    }
}

#[derive(Debug, Clone)]
pub struct RealSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

pub fn eigh(m: &HermitianMatrix) -> Result<Spectrum> {
    let n = m.dim();
    let cap = sweep_cap(n);
    let eig = SymmetricEigen::try_new(m.data.clone(), f64::EPSILON, cap)
        .ok_or(Error::NoConvergence { dim: n, max_iter: cap })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence { dim: n, max_iter: cap });
    }
    let eigenvectors = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub verdict: bool,
    pub min_eig: f64,
}

/// PSD test with an absolute tolerance: true iff `λ_min ≥ -tol`.
pub fn is_psd(m: &HermitianMatrix, tol: f64) -> Result<PsdCheck> {
    assert!(tol >= 0.0, "tolerance must be nonnegative");
    let min_eig = eigh(m)?.min();
    Ok(PsdCheck {
        verdict: min_eig >= -tol,
        min_eig,
    })
}

/// PSD test with tolerance `rel_tol · max|λ|`.
pub fn is_psd_relative(m: &HermitianMatrix, rel_tol: f64) -> Result<PsdCheck> {
    let spec = eigh(m)?;
    let min_eig = spec.min();
    Ok(PsdCheck {
        verdict: min_eig >= -rel_tol * spec.max_abs(),
        min_eig,
    })
}

/// Number of eigenvalues with `|λ| > tol · max(1, max|λ|)`.
pub fn numerical_rank(m: &HermitianMatrix, tol: f64) -> Result<usize> {
    assert!(tol >= 0.0, "tolerance must be nonnegative");
    let spec = eigh(m)?;
    let cut = tol * spec.max_abs().max(1.0);
    Ok(spec.eigenvalues.iter().filter(|x| x.abs() > cut).count())
}

/// Nearest PSD matrix in Frobenius norm: clip negative eigenvalues to zero.
pub fn psd_project(m: &RealSymMatrix) -> Result<RealSymMatrix> {
    let spec = m.eigh()?;
    if spec.eigenvalues[0] >= 0.0 {
        return Ok(m.clone());
    }
    let v = &spec.eigenvectors;
    let n = m.dim();
    let mut out = DMatrix::<f64>::zeros(n, n);
    for (c, &lam) in spec.eigenvalues.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let col = v.column(c);
        out += lam * col * col.transpose();
    }
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (out[(i, j)] + out[(j, i)]));
    Ok(RealSymMatrix { data: sym })
}
