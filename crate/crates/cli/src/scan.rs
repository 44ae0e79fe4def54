//! Grid scan of the `d = 3` coherence family: CSV table and SVG scatter.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use copw_core::certify::{certify_state, Verdict};
use copw_core::matrix::C64;
use copw_core::symmetric::{d3_blocks, DsProbabilities};
use copw_core::witness::{expectation, Witness};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One scanned coordinate: an inclusive linear range or explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Range { min: f64, max: f64, steps: usize },
    Values { values: Vec<f64> },
}

impl Axis {
    pub fn fixed(x: f64) -> Self {
        Axis::Values { values: vec![x] }
    }

    pub fn points(&self) -> Vec<f64> {
        match self {
            Axis::Values { values } => values.clone(),
            Axis::Range { min, max, steps } => match steps {
                0 => Vec::new(),
                1 => vec![*min],
                n => (0..*n)
                    .map(|k| {
                        if k + 1 == *n {
                            *max
                        } else {
                            min + (max - min) * k as f64 / (*n - 1) as f64
                        }
                    })
                    .collect(),
            },
        }
    }
}

fn zero_axis() -> Axis {
    Axis::fixed(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    AlphaRe,
    AlphaIm,
    BetaRe,
    BetaIm,
    GammaRe,
    GammaIm,
}

impl AxisName {
    pub const ALL: [AxisName; 6] = [
        AxisName::AlphaRe,
        AxisName::AlphaIm,
        AxisName::BetaRe,
        AxisName::BetaIm,
        AxisName::GammaRe,
        AxisName::GammaIm,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AxisName::AlphaRe => "alpha_re",
            AxisName::AlphaIm => "alpha_im",
            AxisName::BetaRe => "beta_re",
            AxisName::BetaIm => "beta_im",
            AxisName::GammaRe => "gamma_re",
            AxisName::GammaIm => "gamma_im",
        }
    }
}

/// Grid over the six real coordinates of `(α, β, γ)`; unspecified axes are
/// fixed at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default = "zero_axis")]
    pub alpha_re: Axis,
    #[serde(default = "zero_axis")]
    pub alpha_im: Axis,
    #[serde(default = "zero_axis")]
    pub beta_re: Axis,
    #[serde(default = "zero_axis")]
    pub beta_im: Axis,
    #[serde(default = "zero_axis")]
    pub gamma_re: Axis,
    #[serde(default = "zero_axis")]
    pub gamma_im: Axis,
}

impl GridSpec {
    /// Real `α, β ∈ [−0.2, 0.2]` with 201 steps each, `γ ∈ {0, p_01/4}`.
    pub fn default_for(p: &DsProbabilities) -> Self {
        let band = Axis::Range {
            min: -0.2,
            max: 0.2,
            steps: 201,
        };
        Self {
            alpha_re: band.clone(),
            alpha_im: zero_axis(),
            beta_re: band,
            beta_im: zero_axis(),
            gamma_re: Axis::Values {
                values: vec![0.0, p.get(0, 1) / 4.0],
            },
            gamma_im: zero_axis(),
        }
    }

    pub fn axis(&self, name: AxisName) -> &Axis {
        match name {
            AxisName::AlphaRe => &self.alpha_re,
            AxisName::AlphaIm => &self.alpha_im,
            AxisName::BetaRe => &self.beta_re,
            AxisName::BetaIm => &self.beta_im,
            AxisName::GammaRe => &self.gamma_re,
            AxisName::GammaIm => &self.gamma_im,
        }
    }

    /// All grid points in row-major order (`alpha_re` slowest).
    pub fn points(&self) -> Vec<[f64; 6]> {
        let axes: Vec<Vec<f64>> = AxisName::ALL.iter().map(|&a| self.axis(a).points()).collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let mut out = Vec::with_capacity(total);
        for k in 0..total {
            let mut rem = k;
            let mut pt = [0.0; 6];
            for a in (0..6).rev() {
                let n = axes[a].len();
                pt[a] = axes[a][rem % n];
                rem /= n;
            }
            out.push(pt);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    #[serde(rename = "invalid")]
    Invalid,
    #[serde(rename = "NPT")]
    Npt,
    #[serde(rename = "PPT-undetected")]
    PptUndetected,
    #[serde(rename = "PPT-detected")]
    PptDetected,
}

impl PointClass {
    fn color(self) -> &'static str {
        match self {
            PointClass::Invalid => "#e0e0e0",
            PointClass::Npt => "#9e9e9e",
            PointClass::PptUndetected => "#ffcc80",
            PointClass::PptDetected => "#e65100",
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub gamma_re: f64,
    pub gamma_im: f64,
    pub state_min_eig: f64,
    pub pt_min_eig: f64,
    pub witness_value: f64,
    pub class: PointClass,
}

impl ScanRecord {
    pub fn coherences(&self) -> (C64, C64, C64) {
        (
            C64::new(self.alpha_re, self.alpha_im),
            C64::new(self.beta_re, self.beta_im),
            C64::new(self.gamma_re, self.gamma_im),
        )
    }

    fn coord(&self, a: AxisName) -> f64 {
        match a {
            AxisName::AlphaRe => self.alpha_re,
            AxisName::AlphaIm => self.alpha_im,
            AxisName::BetaRe => self.beta_re,
            AxisName::BetaIm => self.beta_im,
            AxisName::GammaRe => self.gamma_re,
            AxisName::GammaIm => self.gamma_im,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub grid: GridSpec,
    pub records: Vec<ScanRecord>,
}

impl ScanReport {
    pub fn count(&self, class: PointClass) -> usize {
        self.records.iter().filter(|r| r.class == class).count()
    }
}

/// Classifies every grid point of the `d = 3` family built on `p`.
pub fn scan_d3(p: &DsProbabilities, w: &Witness, grid: &GridSpec, tol: f64) -> Result<ScanReport, CliError> {
    if p.d() != 3 || w.d() != 3 {
        return Err(CliError::Parse(format!(
            "scan needs d = 3 weights and witness, got d = {} and {}",
            p.d(),
            w.d()
        )));
    }
    let points = grid.points();
    if points.is_empty() {
        return Err(CliError::Parse("scan grid is empty".into()));
    }
    let records = points
        .par_iter()
        .map(|pt| evaluate(p, w, pt, tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScanReport {
        grid: grid.clone(),
        records,
    })
}

fn evaluate(p: &DsProbabilities, w: &Witness, pt: &[f64; 6], tol: f64) -> Result<ScanRecord, CliError> {
    let (a, b, g) = (
        C64::new(pt[0], pt[1]),
        C64::new(pt[2], pt[3]),
        C64::new(pt[4], pt[5]),
    );
    let (state, _) = d3_blocks(p, a, b, g)?;
    let (report, _) = certify_state(&state, w, tol)?;
    let value = match report.witness_value {
        Some(v) => v,
        None => expectation(w, &state)?,
    };
    let class = if !report.state_valid {
        PointClass::Invalid
    } else if !report.ppt {
        PointClass::Npt
    } else if report.verdict == Verdict::PptEntangled {
        PointClass::PptDetected
    } else {
        PointClass::PptUndetected
    };
    Ok(ScanRecord {
        alpha_re: pt[0],
        alpha_im: pt[1],
        beta_re: pt[2],
        beta_im: pt[3],
        gamma_re: pt[4],
        gamma_im: pt[5],
        state_min_eig: report.state_min_eig,
        pt_min_eig: report.pt_min_eig,
        witness_value: value,
        class,
    })
}

pub fn to_csv(report: &ScanReport) -> Result<Vec<u8>, CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for r in &report.records {
        wtr.serialize(r)?;
    }
    wtr.into_inner().map_err(|e| CliError::Parse(e.to_string()))
}

pub fn from_csv(bytes: &[u8]) -> Result<Vec<ScanRecord>, CliError> {
    let mut rdr = csv::Reader::from_reader(bytes);
    rdr.deserialize().map(|r| r.map_err(CliError::from)).collect()
}

/// Which two coordinates to plot; every other coordinate is sliced at
/// `slice[axis]`, or at its first grid value when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvgView {
    pub x: AxisName,
    pub y: AxisName,
    #[serde(default)]
    pub slice: BTreeMap<AxisName, f64>,
}

impl Default for SvgView {
    fn default() -> Self {
        Self {
            x: AxisName::AlphaRe,
            y: AxisName::BetaRe,
            slice: BTreeMap::new(),
        }
    }
}

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 70.0;

pub fn to_svg(report: &ScanReport, view: &SvgView) -> Result<String, CliError> {
    if view.x == view.y {
        return Err(CliError::Parse("SVG axes must differ".into()));
    }
    let mut fixed = BTreeMap::new();
    for a in AxisName::ALL {
        if a == view.x || a == view.y {
            continue;
        }
        let v = match view.slice.get(&a) {
            Some(&v) => v,
            None => *report.grid.axis(a).points().first().unwrap_or(&0.0),
        };
        fixed.insert(a, v);
    }
    let xs = report.grid.axis(view.x).points();
    let ys = report.grid.axis(view.y).points();
    let bounds = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, lo + 0.5)
        }
    };
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let plot = CANVAS - 2.0 * MARGIN;
    let cell_w = (plot / xs.len().max(1) as f64).max(1.0);
    let cell_h = (plot / ys.len().max(1) as f64).max(1.0);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * plot;
    let py = |y: f64| CANVAS - MARGIN - (y - y0) / (y1 - y0) * plot;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for r in &report.records {
        if fixed.iter().any(|(&a, &v)| r.coord(a) != v) {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
            px(r.coord(view.x)) - cell_w / 2.0,
            py(r.coord(view.y)) - cell_h / 2.0,
            cell_w,
            cell_h,
            r.class.color()
        );
    }
    let (l, b, rgt, top) = (MARGIN, CANVAS - MARGIN, CANVAS - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{top}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    );
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="{anchor}">{v}</text>"#,
            px(v),
            b + 18.0
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v}</text>"#,
            l - 6.0,
            py(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (l + rgt) / 2.0,
        b + 40.0,
        view.x.label()
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        (top + b) / 2.0,
        (top + b) / 2.0,
        view.y.label()
    );
    let slice_text: Vec<String> = fixed.iter().map(|(a, v)| format!("{}={v}", a.label())).collect();
    let _ = writeln!(
        s,
        r#"<text x="{l}" y="{:.1}">{}</text>"#,
        top - 30.0,
        slice_text.join(", ")
    );
    for (k, class) in [
        PointClass::Invalid,
        PointClass::Npt,
        PointClass::PptUndetected,
        PointClass::PptDetected,
    ]
    .iter()
    .enumerate()
    {
        let x = l + 130.0 * k as f64;
        let name = serde_json::to_value(class).expect("class serializes");
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            top - 20.0,
            class.color(),
            x + 14.0,
            top - 11.0,
            name.as_str().unwrap_or_default()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
