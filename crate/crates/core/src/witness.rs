//! Witnesses `W = (H^ext)^{T_B}` built from real symmetric matrices, their
//! symmetric projections, decomposable splits and coherence-augmented forms.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, RealSymMatrix, C64};
use crate::symmetric::{dicke_vector, partial_transpose, sym_projected, SymmetricState};

/// Input bounds accepted by [`pq_split`].
pub const SPLIT_PSD_TOL: f64 = 1e-7;
pub const SPLIT_NONNEG_TOL: f64 = 1e-9;

/// Imaginary residue tolerated in `Tr(Wρ)`, relative to `max(1, ‖W‖‖ρ‖)`.
const EXPECTATION_IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Decomposable,
    NonDecomposable,
    Unclassified,
}

/// Key `(i, (j, k))` of a coherence coefficient `W^i_jk`, with `j < k`.
pub type CoherenceKey = (usize, (usize, usize));

#[derive(Debug, Clone)]
pub struct Witness {
    d: usize,
    w: HermitianMatrix,
    source: RealSymMatrix,
    coherence_coeffs: BTreeMap<CoherenceKey, f64>,
    classification: Classification,
    projected: bool,
}

impl Witness {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.w
    }

    pub fn source(&self) -> &RealSymMatrix {
        &self.source
    }

    pub fn coherence_coeffs(&self) -> &BTreeMap<CoherenceKey, f64> {
        &self.coherence_coeffs
    }

    pub fn has_coherences(&self) -> bool {
        !self.coherence_coeffs.is_empty()
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    /// Whether `w` has been compressed onto the symmetric subspace.
    pub fn is_projected(&self) -> bool {
        self.projected
    }

    pub fn with_classification(mut self, c: Classification) -> Self {
        self.classification = c;
        self
    }
}

/// `H^ext = Σ H_ij |i⟩⟨j| ⊗ |i⟩⟨j|`.
pub fn extend(h: &RealSymMatrix) -> HermitianMatrix {
    let d = h.dim();
    let mut m = DMatrix::<C64>::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = C64::new(h.get(i, j), 0.0);
        }
    }
    HermitianMatrix::from_trusted(m)
}

/// `W = (H^ext)^{T_B} = Σ H_ij |ij⟩⟨ji|`.
pub fn witness(h: &RealSymMatrix) -> Witness {
    let d = h.dim();
    Witness {
        d,
        w: partial_transpose(&extend(h), d),
        source: h.clone(),
        coherence_coeffs: BTreeMap::new(),
        classification: Classification::Unclassified,
        projected: false,
    }
}

/// `W_S = Π_S W Π_S`.
pub fn project_sym(w: &Witness) -> Witness {
    Witness {
        w: sym_projected(&w.w, w.d),
        projected: true,
        ..w.clone()
    }
}

/// Decomposable form: `P = Π_S (H_n^ext)^{T_B} Π_S` and
/// `Q = H_psd^ext`, so that `P + Q^{T_B}` reproduces the projected witness of
/// `H_psd + H_n` on the symmetric subspace.
pub fn pq_split(
    h_psd: &RealSymMatrix,
    h_n: &RealSymMatrix,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let d = h_psd.dim();
    if h_n.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: h_n.dim(),
        });
    }
    let min_eig = h_psd.min_eigenvalue()?;
    if min_eig < -SPLIT_PSD_TOL {
        return Err(Error::InvalidParameter(format!(
            "PSD part has eigenvalue {min_eig:.3e} below -{SPLIT_PSD_TOL:e}"
        )));
    }
    let min_entry = h_n.min_entry();
    if min_entry < -SPLIT_NONNEG_TOL {
        return Err(Error::InvalidParameter(format!(
            "nonnegative part has entry {min_entry:.3e} below -{SPLIT_NONNEG_TOL:e}"
        )));
    }
    let p = sym_projected(&partial_transpose(&extend(h_n), d), d);
    Ok((p, extend(h_psd)))
}

/// Projected witness of `H` plus coherence terms
/// `Σ_{i, j≠k} W^i_jk (|D_ii⟩⟨D_jk| + h.c.)`.
///
/// The sum runs over ordered pairs `(j, k)` with `W^i_jk = W^i_kj`, so each
/// unordered coefficient contributes twice. Keys may name `(j, k)` in either
/// order; supplying both orders with different values is an error.
pub fn coherent_witness(h: &RealSymMatrix, coeffs: &BTreeMap<CoherenceKey, f64>) -> Result<Witness> {
    let d = h.dim();
    let mut canonical: BTreeMap<CoherenceKey, f64> = BTreeMap::new();
    for (&(i, (j, k)), &c) in coeffs {
        if i >= d || j >= d || k >= d {
            return Err(Error::IndexOutOfRange {
                index: i.max(j).max(k),
                d,
            });
        }
        if i == j || i == k || j == k {
            return Err(Error::InvalidParameter(format!(
                "coherence index ({i},({j},{k})) needs three distinct levels"
            )));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coefficient for ({i},({j},{k})) is not finite"
            )));
        }
        let key = (i, (j.min(k), j.max(k)));
        if let Some(&prev) = canonical.get(&key) {
            if prev != c {
                return Err(Error::InvalidParameter(format!(
                    "conflicting coefficients {prev} and {c} for ({i},({},{}))",
                    key.1 .0, key.1 .1
                )));
            }
        }
        canonical.insert(key, c);
    }

    let base = project_sym(&witness(h));
    let mut m = base.w.into_matrix();
    for (&(i, (j, k)), &c) in &canonical {
        let u = dicke_vector(i, i, d)?;
        let v = dicke_vector(j, k, d)?;
        let term = (&u * v.adjoint()) * C64::new(2.0 * c, 0.0);
        m += &term + term.adjoint();
    }
    Ok(Witness {
        d,
        w: HermitianMatrix::from_trusted(m),
        source: h.clone(),
        coherence_coeffs: canonical,
        classification: Classification::Unclassified,
        projected: true,
    })
}

/// `Tr(W ρ)`.
pub fn expectation(w: &Witness, s: &SymmetricState) -> Result<f64> {
    if w.d != s.d() {
        return Err(Error::DimensionMismatch {
            expected: w.d,
            found: s.d(),
        });
    }
    let v = w.w.trace_product(s.rho());
    let scale = (w.w.frobenius_norm() * s.rho().frobenius_norm()).max(1.0);
    debug_assert!(
        v.im.abs() <= EXPECTATION_IMAG_TOL * scale,
        "Tr(Wρ) has imaginary part {}",
        v.im
    );
    Ok(v.re)
}

/// `⟨ee|W|ee⟩` for a single-party vector `e`.
pub fn product_expectation(w: &Witness, e: &[C64]) -> Result<f64> {
    let d = w.d;
    if e.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: e.len(),
        });
    }
    let v = nalgebra::DVector::from_fn(d * d, |a, _| e[a / d] * e[a % d]);
    Ok(w.w.expectation(&v).re)
}
