//! Nonparametric quantile function estimators.
//!
//! [`EmpiricalQf`] is the left-continuous step inverse of the empirical cdf.
//! [`PlottingPositionQf`] interpolates linearly between plotting positions
//! `(p_k, X_(k))` and is constant outside `[p_1, p_n]`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// An evaluable quantile function `p -> Q(p)` on `[0, 1]`.
pub trait QuantileFunction {
    fn quantile(&self, p: f64) -> Result<f64>;

    /// Probabilities in `(0, 1)` where `Q` has a jump or a kink.
    ///
    /// Quadrature over curves built from this function splits its panels at
    /// the images of these points.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<T: QuantileFunction + ?Sized> QuantileFunction for &T {
    fn quantile(&self, p: f64) -> Result<f64> {
        (**self).quantile(p)
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

pub(crate) fn check_unit(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        domain(format!("probability {p} outside [0, 1]"))
    }
}

/// Order statistics `X_(1) <= ... <= X_(n)` of a nonnegative sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sorts `values` ascending. Every value must be finite and nonnegative.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateSample("empty sample".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return domain(format!("sample value {bad} is not a finite nonnegative number"));
        }
        values.sort_by(f64::total_cmp);
        Ok(SortedSample { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// True when every observation is equal.
    pub fn has_zero_spread(&self) -> bool {
        self.min() == self.max()
    }

    /// Multiplies every observation by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return domain(format!("scale factor {c} must be positive"));
        }
        Ok(SortedSample {
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        if self.min() > 0.0 {
            Ok(())
        } else {
            domain("method requires strictly positive observations")
        }
    }

    pub(crate) fn require_len(&self, n: usize) -> Result<()> {
        if self.len() >= n {
            Ok(())
        } else {
            Err(Error::DegenerateSample(format!(
                "need at least {n} observations, got {}",
                self.len()
            )))
        }
    }
}

/// `Q_n(p) = inf { t : F_n(t) >= p }`, with `Q_n(0) = X_(1)`.
#[derive(Debug, Clone)]
pub struct EmpiricalQf<'a> {
    sample: &'a SortedSample,
}

impl<'a> EmpiricalQf<'a> {
    pub fn new(sample: &'a SortedSample) -> Self {
        EmpiricalQf { sample }
    }

    /// 1-based index `k` with `p` in `((k-1)/n, k/n]`.
    fn rank(&self, p: f64) -> usize {
        let n = self.sample.len();
        let nf = n as f64;
        let mut k = (p * nf).ceil();
        if k > 1.0 && p <= (k - 1.0) / nf {
            k -= 1.0;
        }
        (k as usize).clamp(1, n)
    }
}

impl QuantileFunction for EmpiricalQf<'_> {
    fn quantile(&self, p: f64) -> Result<f64> {
        check_unit(p)?;
        Ok(self.sample.values[self.rank(p) - 1])
    }

    fn breakpoints(&self) -> Vec<f64> {
        let n = self.sample.len();
        (1..n).map(|k| k as f64 / n as f64).collect()
    }
}

/// Plotting-position scheme for [`PlottingPositionQf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `p_k = (k - 1/3) / (n + 1/3)`.
    Hf,
    /// `p_k = k / (n + 1)`.
    Wg,
}

impl Scheme {
    /// Plotting positions `p_1 < ... < p_n`.
    pub fn positions(self, n: usize) -> Vec<f64> {
        let nf = n as f64;
        (1..=n)
            .map(|k| {
                let kf = k as f64;
                match self {
                    // (k - 1/3)/(n + 1/3) written without the inexact 1/3
                    Scheme::Hf => (3.0 * kf - 1.0) / (3.0 * nf + 1.0),
                    Scheme::Wg => kf / (nf + 1.0),
                }
            })
            .collect()
    }
}

/// Piecewise-linear quantile estimator through `(p_k, X_(k))`.
#[derive(Debug, Clone)]
pub struct PlottingPositionQf<'a> {
    sample: &'a SortedSample,
    nodes: Vec<f64>,
    scheme: Scheme,
}

impl<'a> PlottingPositionQf<'a> {
    pub fn new(sample: &'a SortedSample, scheme: Scheme) -> Self {
        PlottingPositionQf {
            sample,
            nodes: scheme.positions(sample.len()),
            scheme,
        }
    }

    pub fn hf(sample: &'a SortedSample) -> Self {
        Self::new(sample, Scheme::Hf)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub(crate) fn eval(&self, p: f64) -> f64 {
        let x = self.sample.values();
        let n = x.len();
        if p <= self.nodes[0] {
            return x[0];
        }
        if p >= self.nodes[n - 1] {
            return x[n - 1];
        }
        // first node strictly greater than p; 1 <= j <= n-1
        let j = self.nodes.partition_point(|&node| node <= p);
        let (p0, p1) = (self.nodes[j - 1], self.nodes[j]);
        let (x0, x1) = (x[j - 1], x[j]);
        x0 + (x1 - x0) * ((p - p0) / (p1 - p0))
    }
}

impl QuantileFunction for PlottingPositionQf<'_> {
    fn quantile(&self, p: f64) -> Result<f64> {
        check_unit(p)?;
        Ok(self.eval(p))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.nodes.clone()
    }
}
