//! Minimum-distance fits of the Weibull shape to a nonparametric curve.
//!
//! The estimate minimises the squared L2 distance
//! `int_0^1 (c_ref(p) - c_beta(p))^2 dp` between a reference curve (qZ or qD
//! of the empirical or HF quantile function) and the closed-form Weibull
//! curve, over the shape alone: the Weibull curves do not depend on scale.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curves::{curve_on_grid, CurveKind};
use crate::empirical_qf::{EmpiricalQf, PlottingPositionQf, SortedSample};
use crate::error::{Error, Result};
use crate::optimize::golden_section;
use crate::quadrature::{Grid, QuadratureSpec};
use crate::shape_estimators::{EstimateResult, Method};
use crate::weibull::{check_shape, log_ratio};

/// Nonparametric curve the parametric curve is matched to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    /// Step-function empirical quantile function.
    Empirical,
    /// HF plotting-position quantile function.
    Hf,
}

impl Reference {
    /// `mde` or `mdhf`.
    pub fn method_id(self) -> &'static str {
        match self {
            Reference::Empirical => "mde",
            Reference::Hf => "mdhf",
        }
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.method_id())
    }
}

impl FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mde" => Ok(Reference::Empirical),
            "mdhf" => Ok(Reference::Hf),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdConfig {
    pub curve: CurveKind,
    pub reference: Reference,
    /// Starting estimator; `None` tries `pe` and falls back to `lm`.
    pub start_method: Option<Method>,
    pub quadrature: QuadratureSpec,
    /// Initial search interval is `[beta0 / f, beta0 * f]`.
    pub bracket_factor: f64,
    /// Golden-section tolerance on `ln beta`.
    pub tol: f64,
}

impl MdConfig {
    pub fn new(curve: CurveKind, reference: Reference) -> Self {
        MdConfig {
            curve,
            reference,
            start_method: None,
            quadrature: QuadratureSpec::default(),
            bracket_factor: 5.0,
            tol: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if !(self.tol > 0.0) || !(self.bracket_factor > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need tol > 0 and bracket_factor > 1, got {} and {}",
                self.tol, self.bracket_factor
            )));
        }
        Ok(())
    }
}

const MAX_BRACKET_DOUBLINGS: usize = 3;

/// Reference curve and closed-form log-ratios on a fixed quadrature grid.
///
/// Built once per sample; evaluating the objective costs one `exp` per grid
/// point.
#[derive(Debug, Clone)]
pub struct MdProblem {
    grid: Grid,
    reference: Vec<f64>,
    log_ratios: Vec<f64>,
}

impl MdProblem {
    pub fn new(sample: &SortedSample, curve: CurveKind, reference: Reference, grid: Grid) -> Result<Self> {
        let values = match reference {
            Reference::Empirical => curve_on_grid(&EmpiricalQf::new(sample), curve, &grid)?,
            Reference::Hf => curve_on_grid(&PlottingPositionQf::hf(sample), curve, &grid)?,
        };
        Ok(Self::from_reference(values, curve, grid))
    }

    /// Problem with a caller-supplied reference curve on `grid`.
    pub fn from_reference(reference: Vec<f64>, curve: CurveKind, grid: Grid) -> Self {
        assert_eq!(reference.len(), grid.len(), "reference must match grid");
        let log_ratios = grid.points().iter().map(|p| log_ratio(curve, *p)).collect();
        MdProblem {
            grid,
            reference,
            log_ratios,
        }
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    /// `int (c_ref - c_beta)^2` on the grid.
    pub fn objective(&self, beta: f64) -> f64 {
        let inv = 1.0 / beta;
        self.grid
            .weights()
            .iter()
            .zip(&self.reference)
            .zip(&self.log_ratios)
            .map(|((w, r), lr)| {
                // r - (1 - e^{lr/beta})
                let d = r + (lr * inv).exp_m1();
                w * d * d
            })
            .sum()
    }

    /// Golden-section search on `ln beta` around `beta0`.
    pub fn minimise(&self, beta0: f64, bracket_factor: f64, tol: f64) -> Result<(f64, f64, usize)> {
        check_shape(beta0)?;
        let centre = beta0.ln();
        let mut half_width = bracket_factor.ln();
        let mut iterations = 0;
        let f = |lb: f64| self.objective(lb.exp());
        for _ in 0..=MAX_BRACKET_DOUBLINGS {
            let (lo, hi) = (centre - half_width, centre + half_width);
            let m = golden_section(f, lo, hi, tol);
            iterations += m.iterations;
            let pinned = m.x - lo < 2.0 * tol || hi - m.x < 2.0 * tol;
            if !pinned {
                return Ok((m.x.exp(), m.fx, iterations));
            }
            half_width *= 2.0;
        }
        Err(Error::BracketFailure {
            lo: (centre - half_width / 2.0).exp(),
            hi: (centre + half_width / 2.0).exp(),
        })
    }
}

/// Starting shape for the search.
pub fn start_value(sample: &SortedSample, start: Option<Method>) -> Result<f64> {
    let r = match start {
        Some(m) => m.estimate(sample),
        None => Method::Pe
            .estimate(sample)
            .or_else(|_| Method::Lm.estimate(sample)),
    };
    r.map(|e| e.beta_hat)
        .map_err(|e| Error::StartFailure(Box::new(e)))
}

pub fn md_objective(sample: &SortedSample, beta: f64, config: &MdConfig) -> Result<f64> {
    config.validate()?;
    check_shape(beta)?;
    let problem = MdProblem::new(sample, config.curve, config.reference, config.quadrature.grid())?;
    Ok(problem.objective(beta))
}

/// Minimum-distance shape estimate. The achieved objective never exceeds
/// the objective at the starting value.
pub fn md_fit(sample: &SortedSample, config: &MdConfig) -> Result<EstimateResult> {
    config.validate()?;
    let beta0 = start_value(sample, config.start_method)?;
    let problem = MdProblem::new(sample, config.curve, config.reference, config.quadrature.grid())?;
    md_fit_from(&problem, beta0, config)
}

/// [`md_fit`] on a prebuilt problem from a given starting shape.
pub fn md_fit_from(problem: &MdProblem, beta0: f64, config: &MdConfig) -> Result<EstimateResult> {
    let f0 = problem.objective(beta0);
    let (mut beta, mut fx, iterations) = problem.minimise(beta0, config.bracket_factor, config.tol)?;
    if f0 < fx {
        beta = beta0;
        fx = f0;
    }
    Ok(EstimateResult {
        beta_hat: beta,
        method: config.reference.method_id().to_string(),
        iterations,
        residual: fx,
        start: Some(beta0),
    })
}
