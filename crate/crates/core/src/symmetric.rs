//! Two-qudit symmetric states in the Dicke basis.
//!
//! The computational basis vector `|ij⟩` sits at index `i * d + j`. Dicke
//! vectors are `|D_ii⟩ = |ii⟩` and `|D_ij⟩ = (|ij⟩ + |ji⟩)/√2` for `i ≠ j`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{eigh, HermitianMatrix, RealSymMatrix, C64, DEFAULT_PSD_TOL};

/// Relative Frobenius deviation allowed between `Π_S ρ Π_S` and `ρ`.
pub const SYMMETRY_TOL: f64 = 1e-10;

const NORMALIZATION_TOL: f64 = 1e-12;

/// An unordered index pair `{i, j}` labelling the Dicke vector `|D_ij⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DickePair {
    lo: usize,
    hi: usize,
}

impl DickePair {
    pub fn new(i: usize, j: usize) -> Self {
        Self {
            lo: i.min(j),
            hi: i.max(j),
        }
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn hi(self) -> usize {
        self.hi
    }

    pub fn is_diagonal(self) -> bool {
        self.lo == self.hi
    }

    fn check(self, d: usize) -> Result<Self> {
        if self.hi >= d {
            return Err(Error::IndexOutOfRange { index: self.hi, d });
        }
        Ok(self)
    }
}

impl fmt::Display for DickePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lo, self.hi)
    }
}

impl From<(usize, usize)> for DickePair {
    fn from((i, j): (usize, usize)) -> Self {
        Self::new(i, j)
    }
}

/// Weights `p_ij ≥ 0` of a diagonal symmetric state, keyed by unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DsProbabilities {
    d: usize,
    weights: BTreeMap<DickePair, f64>,
}

impl DsProbabilities {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("local dimension must be >= 1".into()));
        }
        Ok(Self {
            d,
            weights: BTreeMap::new(),
        })
    }

    pub fn from_pairs(d: usize, pairs: &[((usize, usize), f64)]) -> Result<Self> {
        let mut p = Self::new(d)?;
        for &((i, j), w) in pairs {
            p.set(i, j, w)?;
        }
        Ok(p)
    }

    /// Sets `p_ij` (equivalently `p_ji`). Zero weights are dropped.
    pub fn set(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        let key = DickePair::new(i, j).check(self.d)?;
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "weight p_{key} must be finite and nonnegative, got {w}"
            )));
        }
        if w == 0.0 {
            self.weights.remove(&key);
        } else {
            self.weights.insert(key, w);
        }
        Ok(())
    }

    pub fn with(mut self, i: usize, j: usize, w: f64) -> Result<Self> {
        self.set(i, j, w)?;
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights
            .get(&DickePair::new(i, j))
            .copied()
            .unwrap_or(0.0)
    }

    /// Nonzero weights in `(i ≤ j)` order.
    pub fn iter(&self) -> impl Iterator<Item = (DickePair, f64)> + '_ {
        self.weights.iter().map(|(&k, &w)| (k, w))
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total() - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Copy rescaled to unit total weight.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.total();
        if t <= 0.0 {
            return Err(Error::InvalidParameter("cannot normalize zero weights".into()));
        }
        Ok(Self {
            d: self.d,
            weights: self.weights.iter().map(|(&k, &w)| (k, w / t)).collect(),
        })
    }
}

/// Coherences `α |D_from⟩⟨D_to| + h.c.` between distinct Dicke vectors.
///
/// Each unordered pair of Dicke vectors is stored once; inserting the
/// reversed orientation stores the conjugate amplitude.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoherenceMap {
    d: usize,
    entries: BTreeMap<(DickePair, DickePair), C64>,
}

impl CoherenceMap {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            entries: BTreeMap::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn insert(
        &mut self,
        from: impl Into<DickePair>,
        to: impl Into<DickePair>,
        amplitude: C64,
    ) -> Result<()> {
        let from = from.into().check(self.d)?;
        let to = to.into().check(self.d)?;
        if from == to {
            return Err(Error::InvalidParameter(format!(
                "coherence needs two distinct Dicke vectors, got D_{from} twice"
            )));
        }
        if from < to {
            self.entries.insert((from, to), amplitude);
        } else {
            self.entries.insert((to, from), amplitude.conj());
        }
        Ok(())
    }

    pub fn with(
        mut self,
        from: impl Into<DickePair>,
        to: impl Into<DickePair>,
        amplitude: C64,
    ) -> Result<Self> {
        self.insert(from, to, amplitude)?;
        Ok(self)
    }

    /// Amplitude on `|D_from⟩⟨D_to|`.
    pub fn get(&self, from: impl Into<DickePair>, to: impl Into<DickePair>) -> C64 {
        let (from, to) = (from.into(), to.into());
        if from < to {
            self.entries.get(&(from, to)).copied().unwrap_or_default()
        } else {
            self.entries
                .get(&(to, from))
                .map(|a| a.conj())
                .unwrap_or_default()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (DickePair, DickePair, C64)> + '_ {
        self.entries.iter().map(|(&(f, t), &a)| (f, t, a))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// A two-qudit operator supported on the symmetric subspace.
///
/// Symmetry is enforced at construction; positivity is measured and exposed
/// through [`SymmetricState::is_valid`] rather than assumed.
#[derive(Debug, Clone)]
pub struct SymmetricState {
    d: usize,
    rho: HermitianMatrix,
    min_eig: f64,
    max_abs_eig: f64,
}

impl SymmetricState {
    pub fn from_matrix(d: usize, rho: HermitianMatrix) -> Result<Self> {
        if rho.dim() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: rho.dim(),
            });
        }
        let deviation = sym_projected(&rho, d).distance(&rho);
        if deviation > SYMMETRY_TOL * rho.frobenius_norm().max(1.0) {
            return Err(Error::NotSymmetricState { deviation });
        }
        let spec = eigh(&rho)?;
        Ok(Self {
            d,
            min_eig: spec.min(),
            max_abs_eig: spec.max_abs(),
            rho,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rho(&self) -> &HermitianMatrix {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace()
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eig
    }

    /// `ρ ⪰ 0` up to `1e-9 · max(1, max|λ|)`.
    pub fn is_valid(&self) -> bool {
        self.min_eig >= -DEFAULT_PSD_TOL * self.max_abs_eig.max(1.0)
    }

    pub fn partial_transpose(&self) -> HermitianMatrix {
        partial_transpose(&self.rho, self.d)
    }
}

fn check_index(i: usize, d: usize) -> Result<()> {
    if i >= d {
        Err(Error::IndexOutOfRange { index: i, d })
    } else {
        Ok(())
    }
}

pub fn dicke_vector(i: usize, j: usize, d: usize) -> Result<DVector<C64>> {
    check_index(i, d)?;
    check_index(j, d)?;
    let mut v = DVector::zeros(d * d);
    if i == j {
        v[i * d + i] = C64::new(1.0, 0.0);
    } else {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[i * d + j] = s;
        v[j * d + i] = s;
    }
    Ok(v)
}

/// `Π_S = (1 + F)/2` on `C^d ⊗ C^d`.
pub fn sym_projector(d: usize) -> Result<HermitianMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "symmetric projector needs d >= 2, got {d}"
        )));
    }
    let n = d * d;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for a in 0..n {
        m[(a, a)] += C64::new(0.5, 0.0);
        m[(a, flip(a, d))] += C64::new(0.5, 0.0);
    }
    Ok(HermitianMatrix::from_trusted(m))
}

/// Index of `|ji⟩` given the index of `|ij⟩`.
fn flip(a: usize, d: usize) -> usize {
    (a % d) * d + a / d
}

/// `Π_S M Π_S`, computed through the flip permutation.
pub(crate) fn sym_projected(m: &HermitianMatrix, d: usize) -> HermitianMatrix {
    let n = d * d;
    let src = m.as_matrix();
    let out = DMatrix::from_fn(n, n, |a, b| {
        let (fa, fb) = (flip(a, d), flip(b, d));
        (src[(a, b)] + src[(fa, b)] + src[(a, fb)] + src[(fa, fb)]) * 0.25
    });
    HermitianMatrix::from_trusted(out)
}

/// `⟨ij|M^{T_B}|kl⟩ = ⟨il|M|kj⟩`.
pub fn partial_transpose(m: &HermitianMatrix, d: usize) -> HermitianMatrix {
    assert_eq!(m.dim(), d * d, "operator is not on C^d ⊗ C^d");
    let src = m.as_matrix();
    let out = DMatrix::from_fn(d * d, d * d, |row, col| {
        let (i, j) = (row / d, row % d);
        let (k, l) = (col / d, col % d);
        src[(i * d + l, k * d + j)]
    });
    HermitianMatrix::from_trusted(out)
}

fn ds_matrix(p: &DsProbabilities) -> DMatrix<C64> {
    let d = p.d();
    let n = d * d;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (pair, w) in p.iter() {
        let (i, j) = (pair.lo(), pair.hi());
        if i == j {
            m[(i * d + i, i * d + i)] += C64::new(w, 0.0);
        } else {
            let h = C64::new(0.5 * w, 0.0);
            for a in [i * d + j, j * d + i] {
                for b in [i * d + j, j * d + i] {
                    m[(a, b)] += h;
                }
            }
        }
    }
    m
}

/// `ρ_DS = Σ p_ij |D_ij⟩⟨D_ij|`.
pub fn build_ds(p: &DsProbabilities) -> SymmetricState {
    let rho = HermitianMatrix::from_trusted(ds_matrix(p));
    SymmetricState::from_matrix(p.d(), rho).expect("Dicke projectors span the symmetric subspace")
}

/// The `d × d` matrix with diagonal `p_ii` and off-diagonal `p_ij / 2`.
pub fn m_matrix(p: &DsProbabilities) -> RealSymMatrix {
    RealSymMatrix::from_fn(p.d(), |i, j| {
        if i == j {
            p.get(i, i)
        } else {
            0.5 * p.get(i, j)
        }
    })
}

/// `ρ_DS + Σ (α |D_from⟩⟨D_to| + h.c.)`.
///
/// A coherence touching an off-diagonal Dicke vector `|D_jk⟩` contributes
/// `α/√2` to each of the computational entries it covers.
pub fn build_symmetric(p: &DsProbabilities, c: &CoherenceMap) -> Result<SymmetricState> {
    let d = p.d();
    if c.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: c.d(),
        });
    }
    let mut m = ds_matrix(p);
    for (from, to, amp) in c.iter() {
        let u = dicke_vector(from.lo(), from.hi(), d)?;
        let v = dicke_vector(to.lo(), to.hi(), d)?;
        let term = (&u * v.adjoint()) * amp;
        m += &term + term.adjoint();
    }
    let rho = HermitianMatrix::from_matrix(m)?;
    SymmetricState::from_matrix(d, rho)
}

/// Computational-basis triples carrying the three `d = 3` blocks.
pub const D3_BLOCK_BASES: [[usize; 3]; 3] = [
    [2, 4, 6], // |02⟩, |11⟩, |20⟩
    [0, 5, 7], // |00⟩, |12⟩, |21⟩
    [1, 3, 8], // |01⟩, |10⟩, |22⟩
];

/// The `d = 3` family with one coherence per block:
/// `α` couples `|D_11⟩` and `|D_02⟩`, `β` couples `|D_00⟩` and `|D_12⟩`,
/// `γ` couples `|D_22⟩` and `|D_01⟩`.
///
/// `α`, `β`, `γ` are the computational-basis block entries
/// `⟨02|ρ|11⟩`, `⟨00|ρ|12⟩` and `⟨01|ρ|22⟩`. Returns the state and its
/// partial transpose.
pub fn d3_blocks(
    p: &DsProbabilities,
    alpha: C64,
    beta: C64,
    gamma: C64,
) -> Result<(SymmetricState, HermitianMatrix)> {
    if p.d() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: p.d(),
        });
    }
    let r = |x: f64| C64::new(x, 0.0);
    let (p00, p11, p22) = (p.get(0, 0), p.get(1, 1), p.get(2, 2));
    let (p01, p02, p12) = (p.get(0, 1), p.get(0, 2), p.get(1, 2));
    let blocks: [[[C64; 3]; 3]; 3] = [
        [
            [r(p02 / 2.0), alpha, r(p02 / 2.0)],
            [alpha.conj(), r(p11), alpha.conj()],
            [r(p02 / 2.0), alpha, r(p02 / 2.0)],
        ],
        [
            [r(p00), beta, beta],
            [beta.conj(), r(p12 / 2.0), r(p12 / 2.0)],
            [beta.conj(), r(p12 / 2.0), r(p12 / 2.0)],
        ],
        [
            [r(p01 / 2.0), r(p01 / 2.0), gamma],
            [r(p01 / 2.0), r(p01 / 2.0), gamma],
            [gamma.conj(), gamma.conj(), r(p22)],
        ],
    ];
    let mut m = DMatrix::<C64>::zeros(9, 9);
    for (basis, block) in D3_BLOCK_BASES.iter().zip(blocks.iter()) {
        for (a, &x) in basis.iter().enumerate() {
            for (b, &y) in basis.iter().enumerate() {
                m[(x, y)] = block[a][b];
            }
        }
    }
    let rho = HermitianMatrix::from_matrix(m)?;
    let state = SymmetricState::from_matrix(3, rho)?;
    let pt = state.partial_transpose();
    Ok((state, pt))
}

/// Dicke-basis coherence map equivalent to the `d3_blocks` parameters.
pub fn d3_coherences(alpha: C64, beta: C64, gamma: C64) -> CoherenceMap {
    let s = std::f64::consts::SQRT_2;
    let mut c = CoherenceMap::new(3);
    // ⟨02|ρ|11⟩ = α  ⇔  √2 α on |D_02⟩⟨D_11|
    for (from, to, amp) in [
        ((0, 2), (1, 1), alpha * s),
        ((0, 0), (1, 2), beta * s),
        ((0, 1), (2, 2), gamma * s),
    ] {
        if amp != C64::default() {
            c.insert(from, to, amp).expect("indices below 3");
        }
    }
    c
}

/// Block parameters of a rank-`(5, 7)` edge candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeParameters {
    pub alpha: f64,
    pub beta: f64,
}

pub fn edge_parameters(p: &DsProbabilities) -> Result<EdgeParameters> {
    if p.d() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: p.d(),
        });
    }
    let (p11, p01, p02, p12) = (p.get(1, 1), p.get(0, 1), p.get(0, 2), p.get(1, 2));
    if p12.is_nan() || p12 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "edge candidate needs p_12 > 0, got {p12}"
        )));
    }
    let slack = p01 * p12 - 2.0 * p02 * p11;
    if slack < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "edge candidate needs p_01 p_12 - 2 p_02 p_11 >= 0, got {slack:e}"
        )));
    }
    Ok(EdgeParameters {
        alpha: (p11 * p02 / 2.0).sqrt(),
        beta: -(p02 * slack / (4.0 * p12)).sqrt(),
    })
}

/// The `γ = 0` member of the `d = 3` family whose coherences saturate the
/// rank conditions of the first block of `ρ` and of both coherent blocks of
/// `ρ^{T_B}`.
pub fn edge_candidate(p: &DsProbabilities) -> Result<SymmetricState> {
    let e = edge_parameters(p)?;
    let (state, _) = d3_blocks(
        p,
        C64::new(e.alpha, 0.0),
        C64::new(e.beta, 0.0),
        C64::default(),
    )?;
    Ok(state)
}
