//! Certification pipeline: PPT test, low-dimensional DS separability,
//! witness classification and state detection.

use std::collections::BTreeMap;
use std::fmt;

use crate::cone::{decompose, DecompositionResult, DEFAULT_DECOMPOSE_MAX_ITER, DEFAULT_DECOMPOSE_TOL};
use crate::error::{Error, Result};
use crate::matrix::{eigh, is_psd, C64};
use crate::symmetric::{build_symmetric, m_matrix, CoherenceMap, DsProbabilities, SymmetricState};
use crate::witness::{expectation, Classification, Witness};

/// Relative tolerance for PPT tests and for calling a witness value negative.
pub const DEFAULT_DETECTION_TOL: f64 = 1e-9;

/// Slack on the coherence bound `|α_ij| ≤ p_ij / 2`.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    NptEntangled,
    PptEntangled,
    SeparableProved,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NptEntangled => "NPT-entangled",
            Verdict::PptEntangled => "PPT-entangled",
            Verdict::SeparableProved => "separable",
            Verdict::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptCheck {
    pub ppt: bool,
    pub min_eig: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub state_valid: bool,
    pub state_min_eig: f64,
    pub ppt: bool,
    pub pt_min_eig: f64,
    pub witness_value: Option<f64>,
    pub verdict: Verdict,
}

/// `ρ^{T_B} ⪰ 0` up to `1e-9 · max(1, max|λ|)`.
pub fn ppt(s: &SymmetricState) -> Result<PptCheck> {
    ppt_with_tol(s, DEFAULT_DETECTION_TOL)
}

pub fn ppt_with_tol(s: &SymmetricState, tol: f64) -> Result<PptCheck> {
    let spec = eigh(&s.partial_transpose())?;
    let min_eig = spec.min();
    Ok(PptCheck {
        ppt: min_eig >= -tol * spec.max_abs().max(1.0),
        min_eig,
    })
}

/// For `d ≤ 4` a DS state is separable iff it is PPT, i.e. iff `M_d ⪰ 0`.
pub fn ds_separable_lowdim(p: &DsProbabilities) -> Result<Verdict> {
    if p.d() > 4 {
        return Err(Error::Unsupported(format!(
            "PPT is only sufficient for DS separability when d <= 4 (got d = {})",
            p.d()
        )));
    }
    let check = is_psd(&m_matrix(p).to_hermitian(), DEFAULT_DETECTION_TOL)?;
    Ok(if check.verdict {
        Verdict::SeparableProved
    } else {
        Verdict::NptEntangled
    })
}

/// Fills the classification of a plain witness from the exceptionality of
/// its source matrix.
pub fn classify_witness(w: &Witness) -> Result<Witness> {
    if w.has_coherences() {
        return Err(Error::Unsupported(
            "witnesses with coherence terms are classified by exhibiting a detected PPT state \
             (certify_state), not from their source matrix"
                .into(),
        ));
    }
    let class = match decompose(w.source(), DEFAULT_DECOMPOSE_TOL, DEFAULT_DECOMPOSE_MAX_ITER)? {
        DecompositionResult::Split { .. } => Classification::Decomposable,
        DecompositionResult::Exceptional { .. } => Classification::NonDecomposable,
    };
    Ok(w.clone().with_classification(class))
}

/// Certifies `s` against `w`. A PPT state detected by `w` proves `w`
/// non-decomposable, so the returned witness carries that classification.
pub fn certify_state(
    s: &SymmetricState,
    w: &Witness,
    tol: f64,
) -> Result<(CertificationReport, Witness)> {
    if w.d() != s.d() {
        return Err(Error::DimensionMismatch {
            expected: w.d(),
            found: s.d(),
        });
    }
    let state_valid = s.is_valid();
    let pt = ppt_with_tol(s, tol)?;
    let mut report = CertificationReport {
        state_valid,
        state_min_eig: s.min_eigenvalue(),
        ppt: pt.ppt,
        pt_min_eig: pt.min_eig,
        witness_value: None,
        verdict: Verdict::Undecided,
    };
    if !state_valid {
        return Ok((report, w.clone()));
    }
    if !pt.ppt {
        report.verdict = Verdict::NptEntangled;
        return Ok((report, w.clone()));
    }
    let value = expectation(w, s)?;
    report.witness_value = Some(value);
    let scale = w.matrix().frobenius_norm().max(1.0);
    if value < -tol * scale && w.classification() != Classification::Decomposable {
        report.verdict = Verdict::PptEntangled;
        return Ok((report, w.clone().with_classification(Classification::NonDecomposable)));
    }
    Ok((report, w.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryOutcome {
    pub state_valid: bool,
    pub ppt: bool,
    pub detected: bool,
    pub value: f64,
}

/// The state `ρ_DS + Σ_{i<j} (α_ij |D_ii⟩⟨D_jj| + h.c.)`.
pub fn corollary_state(
    p: &DsProbabilities,
    alphas: &BTreeMap<(usize, usize), C64>,
) -> Result<SymmetricState> {
    let d = p.d();
    let mut c = CoherenceMap::new(d);
    for (&(i, j), &a) in alphas {
        if i >= d || j >= d {
            return Err(Error::IndexOutOfRange { index: i.max(j), d });
        }
        if i == j {
            return Err(Error::InvalidParameter(format!(
                "coherence ({i},{j}) must couple two distinct levels"
            )));
        }
        let (lo, hi, a) = if i < j { (i, j, a) } else { (j, i, a.conj()) };
        c.insert((lo, lo), (hi, hi), a)?;
    }
    build_symmetric(p, &c)
}

/// PPT-ness of a diagonal-coherence state from the block law
/// (`M_d ⪰ 0` and every `|α_ij| ≤ p_ij / 2`), and whether `w` detects it.
pub fn corollary_family(
    p: &DsProbabilities,
    alphas: &BTreeMap<(usize, usize), C64>,
    w: &Witness,
) -> Result<CorollaryOutcome> {
    let s = corollary_state(p, alphas)?;
    let m_ok = is_psd(&m_matrix(p).to_hermitian(), DEFAULT_DETECTION_TOL)?.verdict;
    let bounds_ok = alphas
        .iter()
        .all(|(&(i, j), a)| a.norm() <= 0.5 * p.get(i, j) + BOUND_SLACK);
    let ppt = m_ok && bounds_ok;
    let value = expectation(w, &s)?;
    let scale = w.matrix().frobenius_norm().max(1.0);
    Ok(CorollaryOutcome {
        state_valid: s.is_valid(),
        ppt,
        detected: ppt && value < -DEFAULT_DETECTION_TOL * scale,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{hoffman_pereira, horn};
    use crate::matrix::{HermitianMatrix, RealSymMatrix};
    use crate::symmetric::{build_ds, dicke_vector};
    use crate::witness::witness;

    /// DS weights read off the 7x7 `M_d` display (`p_ii = M_ii`,
    /// `p_ij = 2 M_ij`); unnormalized, as printed.
    fn hp7_weights() -> DsProbabilities {
        let mut p = DsProbabilities::new(7).unwrap();
        for i in 0..7 {
            p.set(i, i, if i == 0 || i == 6 { 1.0 } else { 2.0 }).unwrap();
        }
        for i in 0..6 {
            p.set(i, i + 1, 2.0).unwrap();
        }
        p.set(0, 6, 0.25).unwrap();
        p.set(2, 6, 0.5).unwrap();
        p
    }

    #[test]
    fn ppt_examples() {
        let phi = dicke_vector(0, 0, 2).unwrap() + dicke_vector(1, 1, 2).unwrap();
        let rho = HermitianMatrix::projector(&(phi * C64::new(0.5f64.sqrt(), 0.0)));
        let s = SymmetricState::from_matrix(2, rho).unwrap();
        let c = ppt(&s).unwrap();
        assert!(!c.ppt);
        assert!((c.min_eig + 0.5).abs() < 1e-12);
    }

    #[test]
    fn lowdim_separability() {
        let mut p = DsProbabilities::new(3).unwrap();
        for i in 0..3 {
            for j in i..3 {
                p.set(i, j, 1.0 / 6.0).unwrap();
            }
        }
        assert_eq!(ds_separable_lowdim(&p).unwrap(), Verdict::SeparableProved);
        let p = DsProbabilities::from_pairs(2, &[((0, 1), 1.0)]).unwrap();
        assert_eq!(ds_separable_lowdim(&p).unwrap(), Verdict::NptEntangled);
        let p = DsProbabilities::from_pairs(4, &[((0, 0), 0.25), ((1, 1), 0.25), ((2, 2), 0.25), ((3, 3), 0.25)])
            .unwrap();
        assert_eq!(ds_separable_lowdim(&p).unwrap(), Verdict::SeparableProved);
        assert!(ds_separable_lowdim(&DsProbabilities::new(5).unwrap()).is_err());
    }

    #[test]
    fn classification() {
        let d3 = RealSymMatrix::from_rows(&[
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, -1.0],
            vec![1.0, -1.0, 1.0],
        ])
        .unwrap();
        assert_eq!(
            classify_witness(&witness(&d3)).unwrap().classification(),
            Classification::Decomposable
        );
        assert_eq!(
            classify_witness(&witness(&horn(5).unwrap())).unwrap().classification(),
            Classification::NonDecomposable
        );
    }

    #[test]
    fn hp7_state_is_detected() {
        let p = hp7_weights();
        let s = build_ds(&p);
        let (report, w) = certify_state(&s, &witness(&hoffman_pereira()), DEFAULT_DETECTION_TOL).unwrap();
        assert_eq!(report.verdict, Verdict::PptEntangled);
        assert!((report.witness_value.unwrap() + 0.25).abs() < 1e-12);
        assert_eq!(w.classification(), Classification::NonDecomposable);
    }

    #[test]
    fn npt_short_circuit() {
        let p = DsProbabilities::from_pairs(3, &[((0, 1), 1.0)]).unwrap();
        let (report, _) =
            certify_state(&build_ds(&p), &witness(&RealSymMatrix::identity(3)), 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::NptEntangled);
        assert_eq!(report.witness_value, None);
    }

    #[test]
    fn corollary_boundary() {
        let p = DsProbabilities::from_pairs(2, &[((0, 0), 0.4), ((1, 1), 0.4), ((0, 1), 0.2)]).unwrap();
        let w = witness(&RealSymMatrix::identity(2));
        let mut a = BTreeMap::new();
        a.insert((0, 1), C64::new(0.1, 0.0));
        let out = corollary_family(&p, &a, &w).unwrap();
        assert!(out.ppt);
        let pt = eigh(&corollary_state(&p, &a).unwrap().partial_transpose()).unwrap();
        assert!(pt.min().abs() < 1e-15);

        a.insert((0, 1), C64::new(0.11, 0.0));
        assert!(!corollary_family(&p, &a, &w).unwrap().ppt);
        let pt = eigh(&corollary_state(&p, &a).unwrap().partial_transpose()).unwrap();
        assert!((pt.min() + 0.01).abs() < 1e-12);

        let mut bad = BTreeMap::new();
        bad.insert((1, 1), C64::new(0.1, 0.0));
        assert!(corollary_family(&p, &bad, &w).is_err());
    }

    #[test]
    fn corollary_keeps_hp7_detection() {
        let p = hp7_weights();
        let w = witness(&hoffman_pereira());
        let mut a = BTreeMap::new();
        a.insert((0, 1), C64::new(0.0, p.get(0, 1) / 2.0));
        a.insert((6, 2), C64::new(-p.get(2, 6) / 4.0, p.get(2, 6) / 5.0));
        let out = corollary_family(&p, &a, &w).unwrap();
        assert!(out.ppt && out.detected && out.state_valid);
        assert!((out.value + 0.25).abs() < 1e-12);
    }
}
