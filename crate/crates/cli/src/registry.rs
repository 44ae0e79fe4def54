//! Named reference examples with their expected outcomes.

use std::collections::BTreeMap;

use copw_core::certify::{certify_state, classify_witness, CertificationReport, Verdict};
use copw_core::cone::{hoffman_pereira, horn};
use copw_core::matrix::{numerical_rank, RealSymMatrix, C64};
use copw_core::symmetric::{
    build_ds, build_symmetric, d3_blocks, edge_candidate, CoherenceMap, DsProbabilities, SymmetricState,
};
use copw_core::witness::{coherent_witness, witness, CoherenceKey, Witness};

use crate::CliError;

pub const NAMES: [&str; 6] = ["horn5", "hp7_ds7", "toth_d3", "rational_d3", "appendixA_d4", "edge57"];

/// Rank tolerance used for the edge-state check.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    /// Verdict, optionally with an exact witness value and its tolerance.
    Verdict {
        verdict: Verdict,
        value: Option<(f64, f64)>,
    },
    /// PPT state with `(rank ρ, rank ρ^{T_B})`.
    EdgeRanks(usize, usize),
}

#[derive(Debug, Clone)]
pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    pub state: SymmetricState,
    pub witness: Witness,
    pub expected: Expectation,
}

#[derive(Debug, Clone)]
pub struct ExampleOutcome {
    pub name: &'static str,
    pub report: CertificationReport,
    pub ranks: (usize, usize),
    pub witness: Witness,
    pub expected: Expectation,
    pub reproduced: bool,
}

fn sym(rows: &[[f64; 3]]) -> RealSymMatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    RealSymMatrix::from_rows(&rows).expect("registered matrices are symmetric")
}

fn coeffs(list: &[CoherenceKey], values: &[f64]) -> BTreeMap<CoherenceKey, f64> {
    list.iter().copied().zip(values.iter().copied()).collect()
}

/// Copositive matrix paired with the `d = 3` Tóth-type state.
pub fn toth_matrix() -> RealSymMatrix {
    sym(&[
        [0.003, 10.39, 100.57],
        [10.39, 59.31, -21.02],
        [100.57, -21.02, 14.22],
    ])
}

pub fn toth_witness() -> Witness {
    let c = coeffs(&[(1, (0, 2)), (0, (1, 2))], &[23.20, -37.40]);
    coherent_witness(&toth_matrix(), &c).expect("valid indices")
}

pub fn toth_weights() -> DsProbabilities {
    DsProbabilities::from_pairs(
        3,
        &[
            ((0, 0), 0.22),
            ((1, 1), 0.234 / 3.0),
            ((2, 2), 0.183),
            ((0, 1), 0.176),
            ((0, 2), 0.167 / 3.0),
            ((1, 2), 0.254),
        ],
    )
    .expect("nonnegative weights")
}

/// `(α, β, γ)` of the Tóth-type example point.
pub fn toth_point() -> (C64, C64, C64) {
    (
        C64::new(0.167 / 3.0, 0.0),
        C64::new(-0.059 / std::f64::consts::SQRT_2, 0.0),
        C64::new(0.0, 0.0),
    )
}

pub fn rational_matrix() -> RealSymMatrix {
    sym(&[
        [1.0 / 172.0, 1009.0 / 151.0, 11025.0 / 68.0],
        [1009.0 / 151.0, 1803.0 / 22.0, -5829.0 / 65.0],
        [11025.0 / 68.0, -5829.0 / 65.0, 1224.0 / 7.0],
    ])
}

pub fn rational_witness() -> Witness {
    let c = coeffs(&[(1, (0, 2)), (0, (1, 2))], &[4595.0 / 191.0, -6114.0 / 113.0]);
    coherent_witness(&rational_matrix(), &c).expect("valid indices")
}

pub fn rational_weights() -> DsProbabilities {
    let a = 1848.0 / 7625.0;
    DsProbabilities::from_pairs(
        3,
        &[
            ((0, 0), a),
            ((1, 1), a),
            ((1, 2), a),
            ((2, 2), 464.0 / 7625.0),
            ((0, 1), 231.0 / 1525.0),
            ((0, 2), 462.0 / 7625.0),
        ],
    )
    .expect("nonnegative weights")
}

/// Block coherences of the registered rational example point, found by a
/// search over the `(α, β, γ)` family at the printed weights.
pub fn rational_point() -> (C64, C64, C64) {
    (
        C64::new(-17.0 / 200.0, 0.0),
        C64::new(9.0 / 200.0, 0.0),
        C64::new(-1.0 / 20.0, 0.0),
    )
}

pub fn d4_matrix() -> RealSymMatrix {
    let rows = [
        [21.0 / 3590.0, 9425.0 / 1571.0, 4853.0 / 464.0, 1111.0 / 28.0],
        [9425.0 / 1571.0, 1293.0 / 88.0, 2122.0 / 145.0, 220.0 / 323.0],
        [4853.0 / 464.0, 2122.0 / 145.0, 6.0 / 5951.0, 1355.0 / 3014.0],
        [1111.0 / 28.0, 220.0 / 323.0, 1355.0 / 3014.0, 862.0 / 7403.0],
    ];
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    RealSymMatrix::from_rows(&rows).expect("symmetric")
}

pub fn d4_witness() -> Witness {
    let c = coeffs(
        &[(0, (2, 3)), (1, (0, 3)), (2, (1, 3))],
        &[6526.0 / 321.0, -1896.0 / 107.0, -549.0 / 1238.0],
    );
    coherent_witness(&d4_matrix(), &c).expect("valid indices")
}

/// The `d = 4` weights with the duplicated `p_11` resolved so that the
/// total is exactly one: `p_11` joins the first group, the `(86+8√2)`
/// group covers `p_12` and `p_23`.
pub fn d4_weights() -> DsProbabilities {
    let s2 = std::f64::consts::SQRT_2;
    let a = (172.0 + 16.0 * s2) / 1817.0;
    let b = (32.0 + 172.0 * s2) / 1817.0;
    let c = (86.0 + 8.0 * s2) / 1817.0;
    let e = (721.0 - 440.0 * s2) / 1817.0;
    DsProbabilities::from_pairs(
        4,
        &[
            ((0, 0), a),
            ((0, 2), a),
            ((0, 3), a),
            ((1, 1), a),
            ((2, 2), a),
            ((0, 1), b),
            ((1, 3), b),
            ((1, 2), c),
            ((2, 3), c),
            ((3, 3), e),
        ],
    )
    .expect("nonnegative weights")
}

/// Dicke-basis coherences of the `d = 4` example: `α = p_00` on
/// `|D_11⟩⟨D_03|`, `β = −p_01/2` on `|D_00⟩⟨D_23|`, `γ = p_01/4` on
/// `|D_22⟩⟨D_13|`. This is the only assignment of the three labels to
/// coherence slots that gives a PSD, PPT state detected by the witness.
pub fn d4_coherences(p: &DsProbabilities) -> CoherenceMap {
    let r = |x: f64| C64::new(x, 0.0);
    CoherenceMap::new(4)
        .with((1, 1), (0, 3), r(p.get(0, 0)))
        .and_then(|c| c.with((0, 0), (2, 3), r(-p.get(0, 1) / 2.0)))
        .and_then(|c| c.with((2, 2), (1, 3), r(p.get(0, 1) / 4.0)))
        .expect("valid indices")
}

/// `p_ii = M_ii`, `p_ij = 2 M_ij` for the printed 7×7 `M_d` (unnormalized).
pub fn hp7_weights() -> DsProbabilities {
    let mut pairs = vec![((0, 0), 1.0), ((6, 6), 1.0), ((0, 6), 0.25), ((2, 6), 0.5)];
    for i in 1..6 {
        pairs.push(((i, i), 2.0));
    }
    for i in 0..6 {
        pairs.push(((i, i + 1), 2.0));
    }
    DsProbabilities::from_pairs(7, &pairs).expect("nonnegative weights")
}

/// Circulant DS state in `d = 5`: `p_ii = 1/11`, `p_{i,i±1} = 6/55`.
pub fn horn5_weights() -> DsProbabilities {
    let mut pairs = Vec::new();
    for i in 0..5 {
        pairs.push(((i, i), 1.0 / 11.0));
        pairs.push(((i, (i + 1) % 5), 6.0 / 55.0));
    }
    DsProbabilities::from_pairs(5, &pairs).expect("nonnegative weights")
}

pub fn edge57_weights() -> DsProbabilities {
    DsProbabilities::from_pairs(
        3,
        &[
            ((0, 0), 0.3),
            ((1, 1), 0.1),
            ((2, 2), 0.2),
            ((0, 1), 0.15),
            ((0, 2), 0.05),
            ((1, 2), 0.2),
        ],
    )
    .expect("nonnegative weights")
}

pub fn build(name: &str) -> Result<Example, CliError> {
    let ppt_entangled = |value| Expectation::Verdict {
        verdict: Verdict::PptEntangled,
        value,
    };
    let ex = match name {
        "horn5" => Example {
            name: "horn5",
            summary: "circulant DS state in d=5 against the Horn witness",
            state: build_ds(&horn5_weights()),
            witness: classify_witness(&witness(&horn(5)?))?,
            expected: ppt_entangled(Some((-1.0 / 11.0, 1e-12))),
        },
        "hp7_ds7" => Example {
            name: "hp7_ds7",
            summary: "7x7 DS state against the Hoffman-Pereira witness",
            state: build_ds(&hp7_weights()),
            witness: classify_witness(&witness(&hoffman_pereira()))?,
            expected: ppt_entangled(Some((-0.25, 1e-12))),
        },
        "toth_d3" => {
            let (a, b, g) = toth_point();
            Example {
                name: "toth_d3",
                summary: "d=3 edge state from the literature against its coherent witness",
                state: d3_blocks(&toth_weights(), a, b, g)?.0,
                witness: toth_witness(),
                expected: ppt_entangled(None),
            }
        }
        "rational_d3" => {
            let (a, b, g) = rational_point();
            Example {
                name: "rational_d3",
                summary: "d=3 rational-weight state against its coherent witness",
                state: d3_blocks(&rational_weights(), a, b, g)?.0,
                witness: rational_witness(),
                expected: ppt_entangled(None),
            }
        }
        "appendixA_d4" => {
            let p = d4_weights();
            Example {
                name: "appendixA_d4",
                summary: "d=4 state with three coherences against its coherent witness",
                state: build_symmetric(&p, &d4_coherences(&p))?,
                witness: d4_witness(),
                expected: ppt_entangled(None),
            }
        }
        "edge57" => Example {
            name: "edge57",
            summary: "d=3 edge candidate built from the rank-lowering coherences",
            state: edge_candidate(&edge57_weights())?,
            witness: toth_witness(),
            expected: Expectation::EdgeRanks(5, 7),
        },
        other => {
            return Err(CliError::UnknownExample {
                name: other.to_string(),
                valid: NAMES.join(", "),
            })
        }
    };
    Ok(ex)
}

pub fn run(name: &str, tol: f64) -> Result<ExampleOutcome, CliError> {
    let ex = build(name)?;
    let (report, witness) = certify_state(&ex.state, &ex.witness, tol)?;
    let ranks = (
        numerical_rank(ex.state.rho(), RANK_TOL)?,
        numerical_rank(&ex.state.partial_transpose(), RANK_TOL)?,
    );
    let reproduced = match ex.expected {
        Expectation::Verdict { verdict, value } => {
            report.verdict == verdict
                && value.is_none_or(|(v, t)| {
                    report.witness_value.is_some_and(|x| (x - v).abs() <= t)
                })
        }
        Expectation::EdgeRanks(r, q) => report.state_valid && report.ppt && ranks == (r, q),
    };
    Ok(ExampleOutcome {
        name: ex.name,
        report,
        ranks,
        witness,
        expected: ex.expected,
        reproduced,
    })
}
