//! Seeded Monte Carlo comparison of curve and index estimators under the
//! Weibull model.
//!
//! Each replication draws one sample (stream addressed by the grid indices
//! and replication number) and fits every requested estimator to it. Curve
//! errors are integrated on the fixed quadrature grid; the true curve and
//! index use the closed form on the same grid.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{curve_on_grid, CurveKind};
use crate::empirical_qf::{EmpiricalQf, PlottingPositionQf, SortedSample};
use crate::error::{Error, Result};
use crate::md_estimation::{md_fit_from, start_value, MdConfig, MdProblem, Reference};
use crate::quadrature::{Grid, QuadratureSpec};
use crate::rng::{cell_stream, child_rng};
use crate::shape_estimators::Method;
use crate::weibull::{log_ratio, WeibullParams};

/// Curve/index estimator compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// Nonparametric curve of the HF quantile function.
    Hf,
    /// Closed-form curve at a minimum-distance shape fitted to that curve.
    Md(Reference),
    /// Closed-form curve at a shape estimate.
    Shape(Method),
}

impl Estimator {
    /// Fixed row order of reports and tables.
    pub const DECLARED: [Estimator; 13] = [
        Estimator::Hf,
        Estimator::Md(Reference::Empirical),
        Estimator::Md(Reference::Hf),
        Estimator::Shape(Method::Ml),
        Estimator::Shape(Method::Mml),
        Estimator::Shape(Method::Bcml),
        Estimator::Shape(Method::Me),
        Estimator::Shape(Method::Lm),
        Estimator::Shape(Method::Tmml),
        Estimator::Shape(Method::Ls),
        Estimator::Shape(Method::Wls),
        Estimator::Shape(Method::G1),
        Estimator::Shape(Method::Pe),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Hf => "hf",
            Estimator::Md(r) => r.method_id(),
            Estimator::Shape(m) => m.as_str(),
        }
    }

    fn rank(self) -> usize {
        Self::DECLARED.iter().position(|e| *e == self).unwrap_or(usize::MAX)
    }

    /// Comma-separated identifiers.
    pub fn valid_ids() -> String {
        Self::DECLARED.map(|e| e.as_str()).join(", ")
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::DECLARED
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::UnknownMethod(format!("{s} (valid: {})", Self::valid_ids())))
    }
}

impl Serialize for Estimator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Estimator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    Mise,
    MseIndex,
    BiasIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Metric {
    pub kind: MetricKind,
    pub curve: CurveKind,
}

impl Metric {
    pub fn new(kind: MetricKind, curve: CurveKind) -> Self {
        Metric { kind, curve }
    }

    pub fn name(self) -> &'static str {
        use CurveKind::*;
        use MetricKind::*;
        match (self.kind, self.curve) {
            (Mise, QZ) => "MISE_qZ",
            (Mise, QD) => "MISE_qD",
            (MseIndex, QZ) => "MSE_qZI",
            (MseIndex, QD) => "MSE_qDI",
            (BiasIndex, QZ) => "BIAS_qZI",
            (BiasIndex, QD) => "BIAS_qDI",
        }
    }

    /// Metrics reported for `curves`, in table order.
    pub fn for_curves(curves: &[CurveKind]) -> Vec<Metric> {
        let mut out = Vec::new();
        for kind in [MetricKind::Mise, MetricKind::MseIndex, MetricKind::BiasIndex] {
            for c in CurveKind::ALL {
                if curves.contains(&c) {
                    out.push(Metric::new(kind, c));
                }
            }
        }
        out
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        for kind in [MetricKind::Mise, MetricKind::MseIndex, MetricKind::BiasIndex] {
            for c in CurveKind::ALL {
                let m = Metric::new(kind, c);
                if m.name() == s {
                    return Ok(m);
                }
            }
        }
        Err(Error::InvalidConfig(format!("unknown metric {s}")))
    }
}

impl Serialize for Metric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub betas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub replications: usize,
    pub estimators: Vec<Estimator>,
    pub curves: Vec<CurveKind>,
    pub master_seed: u64,
    pub workers: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            betas: vec![0.5, 1.0, 2.0, 3.0],
            sizes: vec![30, 100],
            replications: 10_000,
            estimators: Estimator::DECLARED.to_vec(),
            curves: CurveKind::ALL.to_vec(),
            master_seed: 20_240_101,
            workers: 1,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.betas.len() > 256 || self.sizes.len() > 256 {
            return bad("at most 256 shapes and 256 sizes".into());
        }
        if let Some(b) = self.betas.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return bad(format!("shape must be positive and finite, got {b}"));
        }
        if let Some(n) = self.sizes.iter().find(|n| **n < 3) {
            return bad(format!("sample size must be at least 3, got {n}"));
        }
        self.quadrature.validate()
    }

    fn estimators_in_order(&self) -> Vec<Estimator> {
        let mut e = self.estimators.clone();
        e.sort_by_key(|x| x.rank());
        e.dedup();
        e
    }

    fn curves_in_order(&self) -> Vec<CurveKind> {
        CurveKind::ALL.into_iter().filter(|c| self.curves.contains(c)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub estimator: Estimator,
    pub metric: Metric,
    pub n: usize,
    pub beta: f64,
    /// Mean over successful replications.
    pub value: f64,
    /// Monte Carlo standard error of `value`.
    pub std_error: f64,
    pub successes: usize,
    pub failures: usize,
    /// More than 1% of replications failed.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub replications: usize,
    pub betas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub estimators: Vec<Estimator>,
    pub curves: Vec<CurveKind>,
    pub quadrature: QuadratureSpec,
    pub software: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub provenance: Provenance,
    pub cells: Vec<Cell>,
}

impl SimulationReport {
    pub fn get(&self, estimator: Estimator, metric: Metric, n: usize, beta: f64) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.estimator == estimator && c.metric == metric && c.n == n && c.beta == beta)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidConfig(format!("bad report JSON: {e}")))
    }

    /// One row per cell, full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("estimator,metric,n,beta,value,std_error,successes,failures,flagged\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.16e},{:.16e},{},{},{}",
                c.estimator, c.metric, c.n, c.beta, c.value, c.std_error, c.successes, c.failures, c.flagged
            );
        }
        out
    }
}

/// Per-replication error of one estimator on one curve.
#[derive(Debug, Clone, Copy)]
struct RepError {
    ise: f64,
    index_err: f64,
}

/// Grid-based truth and closed-form machinery shared by all replications.
struct Truth {
    grid: Grid,
    /// `ln r(p)` per curve kind on the grid.
    log_ratios: Vec<(CurveKind, Vec<f64>)>,
}

impl Truth {
    fn new(grid: Grid, curves: &[CurveKind]) -> Self {
        let log_ratios = curves
            .iter()
            .map(|k| (*k, grid.points().iter().map(|p| log_ratio(*k, *p)).collect()))
            .collect();
        Truth { grid, log_ratios }
    }

    fn closed(&self, kind: CurveKind, beta: f64) -> Vec<f64> {
        let lr = &self.log_ratios.iter().find(|(k, _)| *k == kind).expect("curve requested").1;
        lr.iter().map(|l| -(l / beta).exp_m1()).collect()
    }

    fn errors(&self, est: &[f64], truth: &[f64], true_index: f64) -> RepError {
        let w = self.grid.weights();
        let mut ise = 0.0;
        let mut index = 0.0;
        for i in 0..w.len() {
            let d = est[i] - truth[i];
            ise += w[i] * d * d;
            index += w[i] * est[i];
        }
        RepError {
            ise,
            index_err: index - true_index,
        }
    }
}

type RepOutcome = Vec<Option<RepError>>;

/// All `(estimator, curve)` errors of one replication, in
/// `estimators x curves` order.
fn replicate(
    sample: &SortedSample,
    estimators: &[Estimator],
    curves: &[CurveKind],
    truth: &Truth,
    true_curves: &[(Vec<f64>, f64)],
    md: &MdConfig,
) -> RepOutcome {
    let grid = &truth.grid;
    let hf_curves: Vec<Result<Vec<f64>>> = curves
        .iter()
        .map(|k| curve_on_grid(&PlottingPositionQf::hf(sample), *k, grid))
        .collect();
    let needs_md = estimators.iter().any(|e| matches!(e, Estimator::Md(_)));
    let emp_curves: Vec<Result<Vec<f64>>> = if estimators.contains(&Estimator::Md(Reference::Empirical)) {
        curves.iter().map(|k| curve_on_grid(&EmpiricalQf::new(sample), *k, grid)).collect()
    } else {
        Vec::new()
    };
    let beta0 = if needs_md { start_value(sample, None).ok() } else { None };

    let mut out = Vec::with_capacity(estimators.len() * curves.len());
    for e in estimators {
        let shape = match e {
            Estimator::Shape(m) => Some(m.estimate(sample).map(|r| r.beta_hat)),
            _ => None,
        };
        for (ci, kind) in curves.iter().enumerate() {
            let (truth_curve, true_index) = &true_curves[ci];
            let curve: Option<Vec<f64>> = match e {
                Estimator::Hf => hf_curves[ci].as_ref().ok().cloned(),
                Estimator::Md(r) => {
                    let reference = match r {
                        Reference::Empirical => &emp_curves[ci],
                        Reference::Hf => &hf_curves[ci],
                    };
                    match (reference, beta0) {
                        (Ok(values), Some(b0)) => {
                            let problem = MdProblem::from_reference(values.clone(), *kind, grid.clone());
                            let cfg = MdConfig { curve: *kind, reference: *r, ..*md };
                            md_fit_from(&problem, b0, &cfg)
                                .ok()
                                .map(|fit| truth.closed(*kind, fit.beta_hat))
                        }
                        _ => None,
                    }
                }
                Estimator::Shape(_) => match &shape {
                    Some(Ok(b)) if b.is_finite() && *b > 0.0 => Some(truth.closed(*kind, *b)),
                    _ => None,
                },
            };
            out.push(curve.map(|c| truth.errors(&c, truth_curve, *true_index)));
        }
    }
    out
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mf = m as f64;
    let mean = values.iter().sum::<f64>() / mf;
    if m == 1 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (mf - 1.0);
    (mean, (var / mf).sqrt())
}

pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let estimators = config.estimators_in_order();
    let curves = config.curves_in_order();
    let truth = Truth::new(config.quadrature.grid(), &curves);
    let md = MdConfig {
        quadrature: config.quadrature,
        ..MdConfig::new(CurveKind::QZ, Reference::Hf)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let metrics = Metric::for_curves(&curves);

    let mut cells = Vec::new();
    for (bi, &beta) in config.betas.iter().enumerate() {
        let model = WeibullParams::new(beta, 1.0)?;
        let true_curves: Vec<(Vec<f64>, f64)> = curves
            .iter()
            .map(|k| {
                let c = truth.closed(*k, beta);
                let index = truth.grid.sum(&c);
                (c, index)
            })
            .collect();
        for (ni, &n) in config.sizes.iter().enumerate() {
            let outcomes: Vec<RepOutcome> = pool.install(|| {
                (0..config.replications)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = child_rng(config.master_seed, cell_stream(bi, ni, rep));
                        let draw = model.sample(&mut rng, n).and_then(SortedSample::new);
                        match draw {
                            Ok(sample) => replicate(&sample, &estimators, &curves, &truth, &true_curves, &md),
                            Err(_) => vec![None; estimators.len() * curves.len()],
                        }
                    })
                    .collect()
            });
            for (ei, e) in estimators.iter().enumerate() {
                let col = |ci: usize| -> Vec<RepError> {
                    outcomes.iter().filter_map(|o| o[ei * curves.len() + ci]).collect()
                };
                for metric in &metrics {
                    let ci = curves.iter().position(|c| *c == metric.curve).expect("curve present");
                    let errs = col(ci);
                    let values: Vec<f64> = errs
                        .iter()
                        .map(|r| match metric.kind {
                            MetricKind::Mise => r.ise,
                            MetricKind::MseIndex => r.index_err * r.index_err,
                            MetricKind::BiasIndex => r.index_err,
                        })
                        .collect();
                    let (value, std_error) = mean_and_se(&values);
                    let failures = config.replications - values.len();
                    cells.push(Cell {
                        estimator: *e,
                        metric: *metric,
                        n,
                        beta,
                        value,
                        std_error,
                        successes: values.len(),
                        failures,
                        flagged: failures * 100 > config.replications,
                    });
                }
            }
        }
    }
    Ok(SimulationReport {
        provenance: Provenance {
            master_seed: config.master_seed,
            replications: config.replications,
            betas: config.betas.clone(),
            sizes: config.sizes.clone(),
            estimators,
            curves,
            quadrature: config.quadrature,
            software: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(Error::InvalidConfig(format!("unknown table format {other}"))),
        }
    }
}

fn fmt_cell(v: Option<f64>, scale: f64) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{:.3}", x * scale),
        _ => "NA".to_string(),
    }
}

/// Summary tables: one block per metric, estimators as rows in declared
/// order, `(n, beta)` pairs as columns, values times `scale` to 3 decimals.
pub fn render_tables(report: &SimulationReport, scale: f64, format: TableFormat) -> String {
    let mut columns: Vec<(usize, f64)> = Vec::new();
    let mut metrics: Vec<Metric> = Vec::new();
    let mut rows: Vec<Estimator> = Vec::new();
    for c in &report.cells {
        if !columns.contains(&(c.n, c.beta)) {
            columns.push((c.n, c.beta));
        }
        if !metrics.contains(&c.metric) {
            metrics.push(c.metric);
        }
        if !rows.contains(&c.estimator) {
            rows.push(c.estimator);
        }
    }
    columns.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    rows.sort_by_key(|e| e.rank());
    let headers: Vec<String> = columns.iter().map(|(n, b)| format!("n={n} beta={b}")).collect();
    let value = |e: Estimator, m: Metric, (n, b): (usize, f64)| {
        fmt_cell(report.get(e, m, n, b).map(|c| c.value), scale)
    };

    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            let mut head = vec!["metric".to_string(), "estimator".to_string()];
            head.extend(headers);
            let _ = writeln!(out, "{}", head.join(","));
            for m in &metrics {
                for e in &rows {
                    let mut line = vec![m.name().to_string(), e.as_str().to_string()];
                    line.extend(columns.iter().map(|col| value(*e, *m, *col)));
                    let _ = writeln!(out, "{}", line.join(","));
                }
            }
        }
        TableFormat::Markdown => {
            let header_line = |out: &mut String| {
                let _ = writeln!(out, "| estimator | {} |", headers.join(" | "));
                let _ = writeln!(out, "|---|{}", "---:|".repeat(headers.len()));
            };
            if metrics.is_empty() {
                header_line(&mut out);
            }
            for (i, m) in metrics.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "**{}**\n", m.name());
                header_line(&mut out);
                for e in &rows {
                    let vals: Vec<String> = columns.iter().map(|col| value(*e, *m, *col)).collect();
                    let _ = writeln!(out, "| {} | {} |", e.as_str(), vals.join(" | "));
                }
            }
        }
    }
    out
}
