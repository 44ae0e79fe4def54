//! JSON formats for matrices, states, coefficients and witnesses.
//!
//! Matrix entries may be JSON numbers or strings holding a decimal or a
//! fraction `"a/b"`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use copw_core::matrix::{HermitianMatrix, RealSymMatrix, C64};
use copw_core::symmetric::{build_symmetric, d3_blocks, CoherenceMap, DsProbabilities, SymmetricState};
use copw_core::witness::{coherent_witness, project_sym, witness, Classification, CoherenceKey, Witness};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64, CliError> {
        match self {
            Scalar::Number(x) => Ok(*x),
            Scalar::Text(s) => parse_scalar(s),
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Number(x)
    }
}

/// Parses `"0.25"`, `"-3"` or `"1848/7625"`.
pub fn parse_scalar(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Parse(format!("cannot read {s:?} as a number or fraction"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(CliError::Parse(format!("zero denominator in {s:?}")));
            }
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<Scalar>>>,
}

fn numeric_rows(rows: &[Vec<Scalar>], dim: usize, what: &str) -> Result<Vec<Vec<f64>>, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Parse(format!("{what} part is not {dim}x{dim}")));
    }
    rows.iter()
        .map(|r| r.iter().map(Scalar::value).collect())
        .collect()
}

impl MatrixJson {
    pub fn from_real(m: &RealSymMatrix) -> Self {
        Self {
            dim: m.dim(),
            re: to_scalars(m.rows()),
            im: None,
        }
    }

    pub fn from_hermitian(m: &HermitianMatrix) -> Self {
        Self {
            dim: m.dim(),
            re: to_scalars(m.real_part()),
            im: (!m.is_real()).then(|| to_scalars(m.imag_part())),
        }
    }

    pub fn to_real(&self) -> Result<RealSymMatrix, CliError> {
        if let Some(im) = &self.im {
            let im = numeric_rows(im, self.dim, "imaginary")?;
            if im.iter().flatten().any(|&x| x != 0.0) {
                return Err(CliError::Parse("expected a real matrix, found imaginary entries".into()));
            }
        }
        Ok(RealSymMatrix::from_rows(&numeric_rows(&self.re, self.dim, "real")?)?)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix, CliError> {
        let re = numeric_rows(&self.re, self.dim, "real")?;
        let im = self
            .im
            .as_ref()
            .map(|im| numeric_rows(im, self.dim, "imaginary"))
            .transpose()?;
        Ok(HermitianMatrix::from_parts(&re, im.as_deref())?)
    }
}

fn to_scalars(rows: Vec<Vec<f64>>) -> Vec<Vec<Scalar>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(Scalar::Number).collect())
        .collect()
}

/// Complex number as `x`, `"a/b"` or `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Real(Scalar),
    Pair([Scalar; 2]),
}

impl ComplexJson {
    pub fn value(&self) -> Result<C64, CliError> {
        match self {
            ComplexJson::Real(x) => Ok(C64::new(x.value()?, 0.0)),
            ComplexJson::Pair([a, b]) => Ok(C64::new(a.value()?, b.value()?)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceJson {
    pub from: [usize; 2],
    pub to: [usize; 2],
    pub amplitude: ComplexJson,
}

/// Block-entry coherences of the `d = 3` family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct D3Json {
    #[serde(default = "zero")]
    pub alpha: ComplexJson,
    #[serde(default = "zero")]
    pub beta: ComplexJson,
    #[serde(default = "zero")]
    pub gamma: ComplexJson,
}

fn zero() -> ComplexJson {
    ComplexJson::Real(Scalar::Number(0.0))
}

/// State description: either explicit `rho`, or DS `weights` keyed `"i,j"`
/// plus optional Dicke-basis `coherences` or `d3` block coherences.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<String, Scalar>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coherences: Vec<CoherenceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d3: Option<D3Json>,
}

fn parse_pair(key: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Parse(format!("weight key {key:?} is not of the form \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

impl StateJson {
    pub fn probabilities(&self) -> Result<DsProbabilities, CliError> {
        let mut p = DsProbabilities::new(self.d)?;
        for (k, v) in &self.weights {
            let (i, j) = parse_pair(k)?;
            p.set(i, j, v.value()?)?;
        }
        Ok(p)
    }

    pub fn build(&self) -> Result<SymmetricState, CliError> {
        if let Some(rho) = &self.rho {
            if !self.weights.is_empty() || !self.coherences.is_empty() || self.d3.is_some() {
                return Err(CliError::Parse(
                    "give either rho or weights/coherences, not both".into(),
                ));
            }
            return Ok(SymmetricState::from_matrix(self.d, rho.to_hermitian()?)?);
        }
        let p = self.probabilities()?;
        if let Some(d3) = &self.d3 {
            if !self.coherences.is_empty() {
                return Err(CliError::Parse("give either d3 or coherences, not both".into()));
            }
            let (s, _) = d3_blocks(&p, d3.alpha.value()?, d3.beta.value()?, d3.gamma.value()?)?;
            return Ok(s);
        }
        let mut c = CoherenceMap::new(self.d);
        for e in &self.coherences {
            c.insert((e.from[0], e.from[1]), (e.to[0], e.to[1]), e.amplitude.value()?)?;
        }
        Ok(build_symmetric(&p, &c)?)
    }
}

pub fn weights_json(p: &DsProbabilities) -> BTreeMap<String, Scalar> {
    p.iter()
        .map(|(pair, w)| (format!("{},{}", pair.lo(), pair.hi()), Scalar::Number(w)))
        .collect()
}

/// One coefficient `W^i_jk`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Scalar,
}

pub fn coefficient_map(list: &[CoefficientJson]) -> Result<BTreeMap<CoherenceKey, f64>, CliError> {
    let mut out = BTreeMap::new();
    for c in list {
        let key = (c.i, (c.j, c.k));
        if out.insert(key, c.value.value()?).is_some() {
            return Err(CliError::Parse(format!(
                "coefficient ({},({},{})) given twice",
                c.i, c.j, c.k
            )));
        }
    }
    Ok(out)
}

pub fn coefficient_list(map: &BTreeMap<CoherenceKey, f64>) -> Vec<CoefficientJson> {
    map.iter()
        .map(|(&(i, (j, k)), &v)| CoefficientJson {
            i,
            j,
            k,
            value: Scalar::Number(v),
        })
        .collect()
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Decomposable => "decomposable",
        Classification::NonDecomposable => "non-decomposable",
        Classification::Unclassified => "unclassified",
    }
}

fn parse_classification(s: &str) -> Result<Classification, CliError> {
    match s {
        "decomposable" => Ok(Classification::Decomposable),
        "non-decomposable" => Ok(Classification::NonDecomposable),
        "unclassified" => Ok(Classification::Unclassified),
        other => Err(CliError::Parse(format!("unknown classification {other:?}"))),
    }
}

/// Witness file. `matrix` is informative; reading rebuilds the operator
/// from `source`, `coefficients` and `projected`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessJson {
    pub d: usize,
    pub source: MatrixJson,
    #[serde(default)]
    pub coefficients: Vec<CoefficientJson>,
    #[serde(default)]
    pub projected: bool,
    #[serde(default = "unclassified")]
    pub classification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
}

fn unclassified() -> String {
    "unclassified".into()
}

impl WitnessJson {
    pub fn from_witness(w: &Witness) -> Self {
        Self {
            d: w.d(),
            source: MatrixJson::from_real(w.source()),
            coefficients: coefficient_list(w.coherence_coeffs()),
            projected: w.is_projected(),
            classification: classification_name(w.classification()).into(),
            matrix: Some(MatrixJson::from_hermitian(w.matrix())),
        }
    }

    pub fn to_witness(&self) -> Result<Witness, CliError> {
        let h = self.source.to_real()?;
        if h.dim() != self.d {
            return Err(CliError::Parse(format!(
                "witness d = {} but source matrix is {}x{}",
                self.d,
                h.dim(),
                h.dim()
            )));
        }
        let coeffs = coefficient_map(&self.coefficients)?;
        let w = if coeffs.is_empty() {
            let w = witness(&h);
            if self.projected {
                project_sym(&w)
            } else {
                w
            }
        } else {
            coherent_witness(&h, &coeffs)?
        };
        Ok(w.with_classification(parse_classification(&self.classification)?))
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(path.display().to_string(), e))
}

pub fn to_pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

/// `f64` as JSON, with non-finite values mapped to `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
