//! Two-parameter Weibull model and its closed-form concentration curves.
//!
//! For shape `beta` and scale `sigma` the quantile function is
//! `Q(p) = sigma * (-ln(1-p))^(1/beta)`. The qZ and qD curves depend on the
//! shape only:
//!
//! ```text
//! qZ(p; beta) = 1 - [ln(1 - p/2) / ln((1-p)/2)]^(1/beta)
//! qD(p; beta) = 1 - [ln(1 - p/2) / ln(p/2)]^(1/beta)
//! ```

use std::f64::consts::LN_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curves::CurveKind;
use crate::empirical_qf::QuantileFunction;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    /// Shape.
    pub beta: f64,
    /// Scale.
    pub sigma: f64,
}

impl WeibullParams {
    pub fn new(beta: f64, sigma: f64) -> Result<Self> {
        check_shape(beta)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return domain(format!("scale {sigma} must be positive"));
        }
        Ok(WeibullParams { beta, sigma })
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return domain(format!("pdf argument {x} must be nonnegative"));
        }
        let z = x / self.sigma;
        if z == 0.0 {
            return Ok(match self.beta {
                b if b < 1.0 => f64::INFINITY,
                b if b == 1.0 => 1.0 / self.sigma,
                _ => 0.0,
            });
        }
        let zb = z.powf(self.beta);
        Ok(self.beta / self.sigma * zb / z * (-zb).exp())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        -(-(x / self.sigma).powf(self.beta)).exp_m1()
    }

    /// `Q(p)` for `p` in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return domain(format!("Weibull quantile needs p in [0, 1), got {p}"));
        }
        Ok(self.sigma * (-(-p).ln_1p()).powf(1.0 / self.beta))
    }

    /// Quantile density `Q'(p)` for `p` in `(0, 1)`.
    pub fn quantile_density(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("quantile density needs p in (0, 1), got {p}"));
        }
        let h = -(-p).ln_1p();
        Ok(self.sigma / self.beta * h.powf(1.0 / self.beta - 1.0) / (1.0 - p))
    }

    /// Inverse-transform draws `Q(u)`, `u` uniform on `[0, 1)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return domain("sample count must be at least 1");
        }
        let inv = 1.0 / self.beta;
        Ok((0..count)
            .map(|_| {
                let u: f64 = rng.gen();
                self.sigma * (-(-u).ln_1p()).powf(inv)
            })
            .collect())
    }

    /// Mean `sigma * Gamma(1 + 1/beta)`.
    pub fn mean(&self) -> f64 {
        self.sigma * statrs::function::gamma::gamma(1.0 + 1.0 / self.beta)
    }
}

impl QuantileFunction for WeibullParams {
    fn quantile(&self, p: f64) -> Result<f64> {
        WeibullParams::quantile(self, p)
    }
}

pub(crate) fn check_shape(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        domain(format!("shape {beta} must be positive and finite"))
    }
}

/// Natural log of the bracketed ratio `r(p)` in the closed-form curves.
///
/// Defined for `p` in `(0, 1)`; `r` lies in `(0, 1)` there.
pub fn log_ratio(kind: CurveKind, p: f64) -> f64 {
    let num = (-0.5 * p).ln_1p();
    let den = match kind {
        CurveKind::QZ => (-p).ln_1p() - LN_2,
        CurveKind::QD => p.ln() - LN_2,
    };
    (num / den).ln()
}

/// Closed-form `qZ(p; beta)` or `qD(p; beta)` including endpoint values.
pub fn closed_curve(kind: CurveKind, beta: f64, p: f64) -> Result<f64> {
    check_shape(beta)?;
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability {p} outside [0, 1]"));
    }
    Ok(match (kind, p) {
        (_, 0.0) => 1.0,
        (CurveKind::QZ, 1.0) => 1.0,
        (CurveKind::QD, 1.0) => 0.0,
        _ => -(log_ratio(kind, p) / beta).exp_m1(),
    })
}

pub fn qz_closed(beta: f64, p: f64) -> Result<f64> {
    closed_curve(CurveKind::QZ, beta, p)
}

pub fn qd_closed(beta: f64, p: f64) -> Result<f64> {
    closed_curve(CurveKind::QD, beta, p)
}

/// Gini index `1 - 2^(-1/beta)` of the Weibull family.
pub fn gini_weibull(beta: f64) -> Result<f64> {
    check_shape(beta)?;
    Ok(-(-LN_2 / beta).exp_m1())
}

/// Shape whose Gini index is `g`; inverse of [`gini_weibull`].
pub fn shape_from_gini(g: f64) -> Result<f64> {
    if !(g > 0.0 && g < 1.0) {
        return domain(format!("Gini value {g} outside (0, 1)"));
    }
    Ok(-LN_2 / (-g).ln_1p())
}

/// `d/d beta` of the closed-form curve at interior `p`:
/// `r^(1/beta) * ln r / beta^2`, which is negative.
pub fn eta_weibull(beta: f64, p: f64, kind: CurveKind) -> Result<f64> {
    check_shape(beta)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("eta needs p in (0, 1), got {p}")));
    }
    let lr = log_ratio(kind, p);
    Ok((lr / beta).exp() * lr / (beta * beta))
}
