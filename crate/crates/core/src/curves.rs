//! Generic qZ / qD curves and their indices for any quantile function.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::empirical_qf::{check_unit, QuantileFunction};
use crate::error::{domain, Error, Result};
use crate::quadrature::{Grid, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveKind {
    /// `1 - Q(p/2) / Q((1+p)/2)`
    #[serde(rename = "qz")]
    QZ,
    /// `1 - Q(p/2) / Q(1-p/2)`
    #[serde(rename = "qd")]
    QD,
}

impl CurveKind {
    pub const ALL: [CurveKind; 2] = [CurveKind::QZ, CurveKind::QD];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::QZ => "qz",
            CurveKind::QD => "qd",
        }
    }

    /// Value at `p = 1`; both curves equal 1 at `p = 0`.
    pub fn right_endpoint(self) -> f64 {
        match self {
            CurveKind::QZ => 1.0,
            CurveKind::QD => 0.0,
        }
    }

    /// Probability whose quantile forms the denominator.
    fn upper_arg(self, p: f64) -> f64 {
        match self {
            CurveKind::QZ => 0.5 * (1.0 + p),
            CurveKind::QD => 1.0 - 0.5 * p,
        }
    }

    /// Curve abscissae where a breakpoint `xi` of `Q` lands.
    fn images(self, xi: f64) -> [f64; 2] {
        match self {
            CurveKind::QZ => [2.0 * xi, 2.0 * xi - 1.0],
            CurveKind::QD => [2.0 * xi, 2.0 - 2.0 * xi],
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qz" => Ok(CurveKind::QZ),
            "qd" => Ok(CurveKind::QD),
            other => Err(Error::InvalidConfig(format!(
                "unknown curve '{other}' (expected qz or qd)"
            ))),
        }
    }
}

/// qZ or qD of `q` at `p`, with the endpoint conventions applied first.
///
/// A zero numerator over a positive denominator gives 1. A zero denominator
/// leaves the curve undefined.
pub fn curve_value<Q: QuantileFunction + ?Sized>(q: &Q, kind: CurveKind, p: f64) -> Result<f64> {
    check_unit(p)?;
    if p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(kind.right_endpoint());
    }
    let num = q.quantile(0.5 * p)?;
    let den = q.quantile(kind.upper_arg(p))?;
    if !(den > 0.0) {
        return Err(Error::DegenerateQuantile { p });
    }
    Ok(1.0 - num / den)
}

/// Curve values at every point of `grid`.
pub fn curve_on_grid<Q: QuantileFunction + ?Sized>(
    q: &Q,
    kind: CurveKind,
    grid: &Grid,
) -> Result<Vec<f64>> {
    grid.points()
        .iter()
        .map(|p| curve_value(q, kind, *p))
        .collect()
}

fn index_at<Q: QuantileFunction + ?Sized>(
    q: &Q,
    kind: CurveKind,
    spec: &QuadratureSpec,
    breaks: &[f64],
) -> Result<f64> {
    spec.grid_with_breaks(breaks)
        .try_integrate(|p| curve_value(q, kind, p))
}

/// Result of [`curve_index_checked`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub value: f64,
    /// Same rule with doubled panel count.
    pub refined: f64,
    pub panels: usize,
    pub nodes: usize,
}

/// Area under the curve: composite Gauss-Legendre with panel edges split at
/// the curve's kinks and jumps, checked against the doubled-panel rule.
pub fn curve_index_checked<Q: QuantileFunction + ?Sized>(
    q: &Q,
    kind: CurveKind,
    spec: &QuadratureSpec,
) -> Result<IndexEstimate> {
    spec.validate()?;
    let mut breaks: Vec<f64> = q
        .breakpoints()
        .into_iter()
        .flat_map(|xi| kind.images(xi))
        .filter(|p| *p > 0.0 && *p < 1.0)
        .collect();
    breaks.extend(endpoint_breaks());
    let value = index_at(q, kind, spec, &breaks)?;
    let refined = index_at(q, kind, &spec.doubled(), &breaks)?;
    if (value - refined).abs() > spec.tol {
        return Err(Error::NonConvergence(format!(
            "{kind} index: {value} at {} panels vs {refined} at {}",
            spec.panels,
            2 * spec.panels
        )));
    }
    Ok(IndexEstimate {
        value,
        refined,
        panels: spec.panels,
        nodes: spec.nodes,
    })
}

/// Geometric panel edges towards both ends of `[0, 1]`, where parametric
/// curves have logarithmic derivative singularities.
fn endpoint_breaks() -> impl Iterator<Item = f64> {
    (9..=40).flat_map(|k| {
        let h = 0.5f64.powi(k);
        [h, 1.0 - h]
    })
}

pub fn curve_index<Q: QuantileFunction + ?Sized>(
    q: &Q,
    kind: CurveKind,
    spec: &QuadratureSpec,
) -> Result<f64> {
    curve_index_checked(q, kind, spec).map(|e| e.value)
}

/// Points `(p, value)` of a curve, `p` strictly increasing in `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveSamples {
    pub points: Vec<(f64, f64)>,
}

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with header `p,value`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,value\n");
        for (p, v) in &self.points {
            out.push_str(&format!("{},{}\n", fmt17(*p), fmt17(*v)));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("p,value") => {}
            other => return domain(format!("expected header 'p,value', got {other:?}")),
        }
        let mut points = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|t| t.trim().parse().ok())
                    .ok_or_else(|| Error::Domain(format!("bad curve row '{line}'")))
            };
            let p = parse(it.next())?;
            let v = parse(it.next())?;
            points.push((p, v));
        }
        Ok(CurveSamples { points })
    }
}

/// Full-precision scientific notation (17 significant digits).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn curve_grid<Q: QuantileFunction + ?Sized>(
    q: &Q,
    kind: CurveKind,
    grid: &[f64],
) -> Result<CurveSamples> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("curve grid must be strictly increasing");
    }
    let points = grid
        .iter()
        .map(|&p| curve_value(q, kind, p).map(|v| (p, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSamples { points })
}

/// `m + 1` equally spaced points `0, 1/m, ..., 1`.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    if m == 0 {
        return vec![0.0];
    }
    (0..=m).map(|i| i as f64 / m as f64).collect()
}
