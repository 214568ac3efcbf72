//! Estimators of the Weibull shape parameter.
//!
//! All estimators are scale invariant: multiplying the sample by `c > 0`
//! leaves the estimate unchanged.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::empirical_qf::{PlottingPositionQf, Scheme, SortedSample};
use crate::error::{domain, Error, Result};
use crate::optimize::brent_root;
use crate::weibull::shape_from_gini;

/// Search interval for equation-solving estimators.
pub const SHAPE_BRACKET: (f64, f64) = (1e-3, 1e3);
const ROOT_XTOL: f64 = 1e-12;
const ROOT_MAX_ITER: usize = 200;

/// First-order bias constant of the ML shape estimator,
/// `18 (pi^2 - 2 zeta(3)) / pi^4` rounded to four decimals.
pub const BCML_CONSTANT: f64 = 1.3795;

/// Shape estimator identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ml,
    Mml,
    Bcml,
    Me,
    Lm,
    Tmml,
    Ls,
    Wls,
    G1,
    Pe,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Ml,
        Method::Mml,
        Method::Bcml,
        Method::Me,
        Method::Lm,
        Method::Tmml,
        Method::Ls,
        Method::Wls,
        Method::G1,
        Method::Pe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ml => "ml",
            Method::Mml => "mml",
            Method::Bcml => "bcml",
            Method::Me => "me",
            Method::Lm => "lm",
            Method::Tmml => "tmml",
            Method::Ls => "ls",
            Method::Wls => "wls",
            Method::G1 => "g1",
            Method::Pe => "pe",
        }
    }

    pub fn estimate(self, sample: &SortedSample) -> Result<EstimateResult> {
        match self {
            Method::Ml => ml_shape(sample),
            Method::Mml => mml_shape(sample),
            Method::Bcml => bcml_shape(sample),
            Method::Me => moment_shape(sample),
            Method::Lm => lmoment_shape(sample),
            Method::Tmml => tmml_shape(sample),
            Method::Ls => ls_shape(sample),
            Method::Wls => wls_shape(sample),
            Method::G1 => gini_shape(sample),
            Method::Pe => pe_shape(sample),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// A fitted shape value with solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub beta_hat: f64,
    pub method: String,
    pub iterations: usize,
    /// Final estimating-equation or objective value.
    pub residual: f64,
    pub start: Option<f64>,
}

impl EstimateResult {
    fn closed_form(method: Method, beta_hat: f64) -> Result<Self> {
        if !(beta_hat > 0.0 && beta_hat.is_finite()) {
            return domain(format!("{method} produced a non-positive shape {beta_hat}"));
        }
        Ok(EstimateResult {
            beta_hat,
            method: method.as_str().to_string(),
            iterations: 0,
            residual: 0.0,
            start: None,
        })
    }
}

fn require_spread(sample: &SortedSample) -> Result<()> {
    if sample.has_zero_spread() {
        Err(Error::DegenerateSample("all observations are equal".into()))
    } else {
        Ok(())
    }
}

/// Log-observations shifted so the maximum is 0. The profile equations are
/// shift invariant on this scale, and `exp(beta * l)` stays within `(0, 1]`.
struct LogSample {
    logs: Vec<f64>,
    mean: f64,
}

impl LogSample {
    fn new(sample: &SortedSample) -> Result<Self> {
        sample.require_len(2)?;
        sample.require_positive()?;
        require_spread(sample)?;
        let top = sample.max().ln();
        let logs: Vec<f64> = sample.values().iter().map(|x| x.ln() - top).collect();
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        Ok(LogSample { logs, mean })
    }

    /// `sum x^b ln x / sum x^b` on the shifted scale.
    fn weighted_mean_log(&self, beta: f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for &l in &self.logs {
            let w = (beta * l).exp();
            num += w * l;
            den += w;
        }
        num / den
    }

    /// `c / beta + mean(ln x) - sum x^b ln x / sum x^b`; `c = 1` is the ML
    /// profile equation. Strictly decreasing in `beta`.
    fn profile(&self, beta: f64, c: f64) -> f64 {
        c / beta + self.mean - self.weighted_mean_log(beta)
    }
}

fn solve_profile(sample: &SortedSample, c: f64, method: Method) -> Result<EstimateResult> {
    let logs = LogSample::new(sample)?;
    let (lo, hi) = SHAPE_BRACKET;
    let root = brent_root(|b| logs.profile(b, c), lo, hi, ROOT_XTOL, ROOT_MAX_ITER)?;
    Ok(EstimateResult {
        beta_hat: root.x,
        method: method.as_str().to_string(),
        iterations: root.iterations,
        residual: root.fx,
        start: None,
    })
}

/// Maximum likelihood: root of
/// `1/beta + (1/n) sum ln X_i - sum X_i^beta ln X_i / sum X_i^beta = 0`.
pub fn ml_shape(sample: &SortedSample) -> Result<EstimateResult> {
    solve_profile(sample, 1.0, Method::Ml)
}

/// Left side of the ML equation in its product form
/// `sum X^b + (1/n)[sum ln X^b] sum X^b - sum X^b ln X^b`, divided by
/// `sum X^b` (computed on max-rescaled data, which leaves the ratio
/// unchanged).
pub fn ml_equation_product_form(sample: &SortedSample, beta: f64) -> Result<f64> {
    let logs = LogSample::new(sample)?;
    let n = logs.logs.len() as f64;
    let xb: Vec<f64> = logs.logs.iter().map(|l| (beta * l).exp()).collect();
    let sum_xb: f64 = xb.iter().sum();
    let sum_log_xb: f64 = logs.logs.iter().map(|l| beta * l).sum();
    let sum_xb_log_xb: f64 = xb.iter().zip(&logs.logs).map(|(w, l)| w * beta * l).sum();
    Ok((sum_xb + sum_log_xb / n * sum_xb - sum_xb_log_xb) / sum_xb)
}

/// Bias-corrected ML: `beta_ml * (1 - 1.3795 / n)`.
pub fn bcml_shape(sample: &SortedSample) -> Result<EstimateResult> {
    sample.require_len(3)?;
    let ml = ml_shape(sample)?;
    let n = sample.len() as f64;
    Ok(EstimateResult {
        beta_hat: ml.beta_hat * (1.0 - BCML_CONSTANT / n),
        method: Method::Bcml.as_str().to_string(),
        ..ml
    })
}

/// Modified ML from the unbiased version of the profile equation.
///
/// With `Y_i = (X_i / sigma)^beta` standard exponential, the ML statistic
/// `U(beta) = beta * [sum X^b ln X / sum X^b - mean(ln X)]` satisfies
/// `E U(beta_0) = 1 - 1/n` (Dirichlet decomposition of `Y / sum Y`), while
/// the ML equation sets `U = 1`. Setting `U = (n-1)/n` instead gives
/// `(n-1)/(n beta) + mean(ln X) - sum X^b ln X / sum X^b = 0`.
pub fn mml_shape(sample: &SortedSample) -> Result<EstimateResult> {
    let n = sample.len() as f64;
    solve_profile(sample, (n - 1.0) / n, Method::Mml)
}

/// Method of moments on the first two raw moments:
/// `Gamma(1 + 2/beta) / Gamma(1 + 1/beta)^2 = mean(X^2) / mean(X)^2`.
pub fn moment_shape(sample: &SortedSample) -> Result<EstimateResult> {
    sample.require_len(2)?;
    require_spread(sample)?;
    // ratio is scale free; normalise by the maximum
    let top = sample.max();
    let n = sample.len() as f64;
    let m1 = sample.values().iter().map(|x| x / top).sum::<f64>() / n;
    let m2 = sample.values().iter().map(|x| (x / top).powi(2)).sum::<f64>() / n;
    let target = (m2 / (m1 * m1)).ln();
    let h = |b: f64| ln_gamma(1.0 + 2.0 / b) - 2.0 * ln_gamma(1.0 + 1.0 / b) - target;
    let (lo, hi) = SHAPE_BRACKET;
    let root = brent_root(h, lo, hi, ROOT_XTOL, ROOT_MAX_ITER)?;
    Ok(EstimateResult {
        beta_hat: root.x,
        method: Method::Me.as_str().to_string(),
        iterations: root.iterations,
        residual: root.fx,
        start: None,
    })
}

/// Sample L-CV `l2 / l1` with the unbiased probability-weighted moments
/// `b0 = mean`, `b1 = (1/n) sum (i-1)/(n-1) X_(i)`, `l2 = 2 b1 - b0`.
pub fn sample_lcv(sample: &SortedSample) -> Result<f64> {
    sample.require_len(2)?;
    let x = sample.values();
    let n = x.len() as f64;
    let b0 = sample.mean();
    if !(b0 > 0.0) {
        return Err(Error::DegenerateSample("sample mean is zero".into()));
    }
    let b1 = x
        .iter()
        .enumerate()
        .map(|(i, v)| i as f64 / (n - 1.0) * v)
        .sum::<f64>()
        / n;
    Ok((2.0 * b1 - b0) / b0)
}

/// Sample Gini index `sum (2i - n - 1) X_(i) / (n^2 mean)`.
pub fn sample_gini(sample: &SortedSample) -> Result<f64> {
    let x = sample.values();
    let n = x.len() as f64;
    let mean = sample.mean();
    if !(mean > 0.0) {
        return Err(Error::DegenerateSample("sample mean is zero".into()));
    }
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (2.0 * (i as f64 + 1.0) - n - 1.0) * v)
        .sum();
    Ok(s / (n * n * mean))
}

/// L-moments: the Weibull L-CV is `1 - 2^(-1/beta)`, so
/// `beta = -ln 2 / ln(1 - l2/l1)`.
pub fn lmoment_shape(sample: &SortedSample) -> Result<EstimateResult> {
    require_spread(sample)?;
    let tau = sample_lcv(sample)?;
    let beta = shape_from_gini(tau)?;
    EstimateResult::closed_form(Method::Lm, beta)
}

/// Gini-index based: inverts `G = 1 - 2^(-1/beta)` at [`sample_gini`].
///
/// The L-CV equals `n/(n-1)` times this Gini estimate, so applying the same
/// inversion to the bias-adjusted Gini reproduces [`lmoment_shape`].
pub fn gini_shape(sample: &SortedSample) -> Result<EstimateResult> {
    sample.require_len(2)?;
    require_spread(sample)?;
    let g = sample_gini(sample)?;
    EstimateResult::closed_form(Method::G1, shape_from_gini(g)?)
}

/// Tiku's modified maximum likelihood on the log scale.
///
/// `ln X` follows the smallest-extreme-value law with location `ln sigma`
/// and scale `delta = 1/beta`. In the likelihood equations `exp(z_(i))` is
/// replaced by its linearisation `alpha_i + gamma_i z_(i)` at
/// `t_i = ln(-ln(1 - i/(n+1)))`, with `gamma_i = e^{t_i}` and
/// `alpha_i = e^{t_i}(1 - t_i)`. Eliminating the location gives
/// `n delta^2 + B delta - C = 0` with
/// `m = sum gamma_i`, `K = sum gamma_i y_(i) / m`,
/// `B = sum (1 - alpha_i)(y_(i) - K)`, `C = sum gamma_i (y_(i) - K)^2`,
/// so `delta = (-B + sqrt(B^2 + 4 n C)) / (2n)`.
pub fn tmml_shape(sample: &SortedSample) -> Result<EstimateResult> {
    sample.require_len(2)?;
    sample.require_positive()?;
    require_spread(sample)?;
    let n = sample.len();
    let nf = n as f64;
    let top = sample.max().ln();
    let y: Vec<f64> = sample.values().iter().map(|x| x.ln() - top).collect();
    let (alpha, gamma): (Vec<f64>, Vec<f64>) = (1..=n)
        .map(|i| {
            let t = (-(-(i as f64) / (nf + 1.0)).ln_1p()).ln();
            let e = t.exp();
            (e * (1.0 - t), e)
        })
        .unzip();
    let m: f64 = gamma.iter().sum();
    let k = gamma.iter().zip(&y).map(|(g, v)| g * v).sum::<f64>() / m;
    let b: f64 = alpha.iter().zip(&y).map(|(a, v)| (1.0 - a) * (v - k)).sum();
    let c: f64 = gamma.iter().zip(&y).map(|(g, v)| g * (v - k).powi(2)).sum();
    let delta = (-b + (b * b + 4.0 * nf * c).sqrt()) / (2.0 * nf);
    EstimateResult::closed_form(Method::Tmml, 1.0 / delta)
}

/// Weighted regression slope of `ln(-ln(1 - p_k))` on `ln X_(k)` at the HF
/// plotting positions.
fn probability_plot_slope(sample: &SortedSample, weighted: bool) -> Result<f64> {
    sample.require_len(2)?;
    sample.require_positive()?;
    require_spread(sample)?;
    let p = Scheme::Hf.positions(sample.len());
    let x: Vec<f64> = sample.values().iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = p.iter().map(|pk| (-(-pk).ln_1p()).ln()).collect();
    let w: Vec<f64> = if weighted {
        p.iter().map(|pk| ((1.0 - pk) * (-pk).ln_1p()).powi(2)).collect()
    } else {
        vec![1.0; p.len()]
    };
    let sw: f64 = w.iter().sum();
    let xbar = w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ybar = w.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for ((wi, xi), yi) in w.iter().zip(&x).zip(&y) {
        sxy += wi * (xi - xbar) * (yi - ybar);
        sxx += wi * (xi - xbar).powi(2);
    }
    Ok(sxy / sxx)
}

/// Least squares on the Weibull probability plot: slope of
/// `ln(-ln(1 - p_k))` regressed on `ln X_(k)`, `p_k` the HF positions.
pub fn ls_shape(sample: &SortedSample) -> Result<EstimateResult> {
    EstimateResult::closed_form(Method::Ls, probability_plot_slope(sample, false)?)
}

/// Weighted least squares on the probability plot with weights
/// `w_k = [(1 - p_k) ln(1 - p_k)]^2`.
pub fn wls_shape(sample: &SortedSample) -> Result<EstimateResult> {
    EstimateResult::closed_form(Method::Wls, probability_plot_slope(sample, true)?)
}

/// Quantile orders used by [`pe_shape`].
pub const PE_ORDERS: (f64, f64) = (0.31, 0.63);

/// Two-quantile estimator at orders .31 and .63:
/// `beta = [ln(-ln(1 - .63)) - ln(-ln(1 - .31))] / [ln Q(.63) - ln Q(.31)]`
/// with `Q` the HF quantile estimate.
pub fn pe_shape(sample: &SortedSample) -> Result<EstimateResult> {
    sample.require_len(2)?;
    let q = PlottingPositionQf::hf(sample);
    let (lo, hi) = PE_ORDERS;
    let (qlo, qhi) = (q.eval(lo), q.eval(hi));
    if !(qlo > 0.0) || !(qhi > qlo) {
        return domain(format!(
            "quantiles at {lo} and {hi} ({qlo}, {qhi}) do not determine a shape"
        ));
    }
    let z = |p: f64| (-(-p).ln_1p()).ln();
    let beta = (z(hi) - z(lo)) / (qhi.ln() - qlo.ln());
    EstimateResult::closed_form(Method::Pe, beta)
}

/// Profile ML scale for a given shape: `(mean X^beta)^(1/beta)`.
pub fn scale_for_shape(sample: &SortedSample, beta: f64) -> Result<f64> {
    crate::weibull::check_shape(beta)?;
    let top = sample.max();
    if !(top > 0.0) {
        return Err(Error::DegenerateSample("all observations are zero".into()));
    }
    let n = sample.len() as f64;
    let m = sample.values().iter().map(|x| (x / top).powf(beta)).sum::<f64>() / n;
    Ok(top * m.powf(1.0 / beta))
}
