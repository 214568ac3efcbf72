//! Anderson-Darling test of the Weibull model with estimated parameters,
//! calibrated by parametric bootstrap.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::empirical_qf::SortedSample;
use crate::error::{Error, Result};
use crate::rng::child_rng;
use crate::shape_estimators::{ml_shape, scale_for_shape};
use crate::weibull::WeibullParams;

pub const DEFAULT_BOOTSTRAP_REPS: usize = 999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub p_value: f64,
    pub bootstrap_reps: usize,
    pub fitted: WeibullParams,
}

/// `A^2` of the sample against `params`.
pub fn ad_statistic(sample: &SortedSample, params: &WeibullParams) -> Result<f64> {
    sample.require_len(2)?;
    let x = sample.values();
    let n = x.len();
    // log F and log(1 - F) from z = (x / sigma)^beta
    let mut log_f = Vec::with_capacity(n);
    let mut log_s = Vec::with_capacity(n);
    for &xi in x {
        let z = (xi / params.sigma).powf(params.beta);
        let lf = (-(-z).exp_m1()).ln();
        if !(xi > 0.0) || !lf.is_finite() || !z.is_finite() {
            return Err(Error::Domain(format!(
                "fitted cdf is 0 or 1 at observation {xi}"
            )));
        }
        log_f.push(lf);
        log_s.push(-z);
    }
    let total: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (log_f[i] + log_s[n - 1 - i]))
        .sum();
    Ok(-(n as f64) - total / n as f64)
}

/// ML shape and profile scale.
pub fn fit_weibull(sample: &SortedSample) -> Result<WeibullParams> {
    let beta = ml_shape(sample)?.beta_hat;
    WeibullParams::new(beta, scale_for_shape(sample, beta)?)
}

/// Fraction of `boot` strictly above `observed`.
pub fn p_value(observed: f64, boot: &[f64]) -> f64 {
    if boot.is_empty() {
        return f64::NAN;
    }
    boot.iter().filter(|b| **b > observed).count() as f64 / boot.len() as f64
}

/// Refitted `A^2` of `reps` samples of size `n` from `model`; replication `i`
/// draws from stream `i` under `seed`.
pub fn bootstrap_statistics(model: &WeibullParams, n: usize, reps: usize, seed: u64) -> Result<Vec<f64>> {
    (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = child_rng(seed, i as u64);
            let y = SortedSample::new(model.sample(&mut rng, n)?)?;
            ad_statistic(&y, &fit_weibull(&y)?)
        })
        .collect()
}

pub fn ad_test(sample: &SortedSample, bootstrap_reps: usize, seed: u64) -> Result<GofResult> {
    if bootstrap_reps == 0 {
        return Err(Error::InvalidConfig("bootstrap_reps must be at least 1".into()));
    }
    sample.require_positive()?;
    let fitted = fit_weibull(sample)?;
    let statistic = ad_statistic(sample, &fitted)?;
    let boot = bootstrap_statistics(&fitted, sample.len(), bootstrap_reps, seed)?;
    Ok(GofResult {
        statistic,
        p_value: p_value(statistic, &boot),
        bootstrap_reps,
        fitted,
    })
}
