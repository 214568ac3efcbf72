//! Asymptotic covariance of the empirical curve process and the variance of
//! the minimum-distance shape estimator.
//!
//! With `u_lo = t/2` and `u_hi = (1+t)/2` (qZ) or `1 - t/2` (qD), the scaled
//! curve error converges to `G(t) = a(t) B(u_lo) - b(t) B(u_hi)` for a
//! Brownian bridge `B`, where `a = (1 - c(t)) Q'(u_lo) / Q(u_lo)` and
//! `b = (1 - c(t)) Q'(u_hi) / Q(u_hi)`.

use serde::Serialize;

use crate::curves::CurveKind;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::weibull::{check_shape, eta_weibull, WeibullParams};

type PFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// True model ingredients of the kernel.
pub struct KernelContext {
    pub beta: f64,
    pub kind: CurveKind,
    q: PFn,
    q_prime: PFn,
    eta: PFn,
}

impl std::fmt::Debug for KernelContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelContext")
            .field("beta", &self.beta)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl KernelContext {
    /// Weibull model with analytic `Q'` and `eta`.
    pub fn weibull(beta: f64, sigma: f64, kind: CurveKind) -> Result<Self> {
        let w = WeibullParams::new(beta, sigma)?;
        Ok(KernelContext {
            beta,
            kind,
            q: Box::new(move |p| w.quantile(p).unwrap_or(f64::NAN)),
            q_prime: Box::new(move |p| w.quantile_density(p).unwrap_or(f64::NAN)),
            eta: Box::new(move |p| eta_weibull(beta, p, kind).unwrap_or(f64::NAN)),
        })
    }

    /// Arbitrary quantile function; `Q'` by central differences with relative
    /// step `1e-6`, `eta` the Weibull shape derivative at `beta`.
    pub fn from_quantile<F>(beta: f64, kind: CurveKind, q: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    {
        check_shape(beta)?;
        let qd = q.clone();
        Ok(KernelContext {
            beta,
            kind,
            q: Box::new(q),
            q_prime: Box::new(move |p| {
                let h = 1e-6 * p.min(1.0 - p);
                (qd(p + h) - qd(p - h)) / (2.0 * h)
            }),
            eta: Box::new(move |p| eta_weibull(beta, p, kind).unwrap_or(f64::NAN)),
        })
    }

    /// Replace the curve derivative `eta`.
    pub fn with_eta<F: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, eta: F) -> Self {
        self.eta = Box::new(eta);
        self
    }

    pub fn eta(&self, t: f64) -> f64 {
        (self.eta)(t)
    }

    fn upper(&self, t: f64) -> f64 {
        match self.kind {
            CurveKind::QZ => 0.5 * (1.0 + t),
            CurveKind::QD => 1.0 - 0.5 * t,
        }
    }
}

fn check_interior(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("kernel needs t in (0, 1), got {t}")))
    }
}

/// `(a(t), b(t))`.
pub fn kernel_ab(ctx: &KernelContext, t: f64) -> Result<(f64, f64)> {
    check_interior(t)?;
    let (lo, hi) = (0.5 * t, ctx.upper(t));
    let (qlo, qhi) = ((ctx.q)(lo), (ctx.q)(hi));
    if !(qlo > 0.0) {
        return Err(Error::DegenerateQuantile { p: lo });
    }
    if !(qhi > 0.0) {
        return Err(Error::DegenerateQuantile { p: hi });
    }
    let ratio = qlo / qhi;
    Ok((ratio * (ctx.q_prime)(lo) / qlo, ratio * (ctx.q_prime)(hi) / qhi))
}

fn bridge(u: f64, v: f64) -> f64 {
    u.min(v) - u * v
}

/// Covariance `R(s, t)` of the limiting curve process.
pub fn kernel_r(ctx: &KernelContext, s: f64, t: f64) -> Result<f64> {
    let (a_s, b_s) = kernel_ab(ctx, s)?;
    let (a_t, b_t) = kernel_ab(ctx, t)?;
    let m = s.min(t);
    Ok(match ctx.kind {
        CurveKind::QZ => {
            a_t * a_s * (0.5 * m - t * s / 4.0) - b_t * a_s * (s / 2.0 - (1.0 + t) * s / 4.0)
                + b_t * b_s * (0.5 * (1.0 + m) - (1.0 + t) * (1.0 + s) / 4.0)
                - a_t * b_s * (t / 2.0 - (1.0 + s) * t / 4.0)
        }
        CurveKind::QD => {
            let st = s * t / 4.0;
            (a_s * a_t + b_s * b_t) * (0.5 * m - st) - (a_s * b_t + b_s * a_t) * st
        }
    })
}

/// `R(s, t)` assembled from the bridge covariance `min(u, v) - uv` at the
/// four pairs of quantile orders.
pub fn kernel_r_generic(ctx: &KernelContext, s: f64, t: f64) -> Result<f64> {
    let (a_s, b_s) = kernel_ab(ctx, s)?;
    let (a_t, b_t) = kernel_ab(ctx, t)?;
    let (ls, hs, lt, ht) = (0.5 * s, ctx.upper(s), 0.5 * t, ctx.upper(t));
    Ok(a_s * a_t * bridge(ls, lt) - a_s * b_t * bridge(ls, ht) - b_s * a_t * bridge(hs, lt)
        + b_s * b_t * bridge(hs, ht))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticVariance {
    /// `A = int int eta(s) eta(t) R(s, t)`.
    pub a: f64,
    /// `C = int eta^2`.
    pub c: f64,
    /// `A / C^2`, the variance of `sqrt(n) (beta_hat - beta)`.
    pub sigma2: f64,
    pub panels: usize,
    pub nodes: usize,
    /// Relative change of `A` between `panels / 2` and `panels`.
    pub rel_change_a: f64,
    pub rel_change_c: f64,
}

pub const VARIANCE_PANELS: usize = 64;
pub const VARIANCE_NODES: usize = 4;
pub const VARIANCE_TOL: f64 = 1e-6;

/// `(A, C)` with `panels` x 4 Gauss-Legendre along each axis; the square is
/// split along the diagonal so the inner rule never straddles `s = t`.
pub fn variance_terms(ctx: &KernelContext, panels: usize) -> Result<(f64, f64)> {
    let rule = gauss_legendre(VARIANCE_NODES);
    // composite rule in u, mapped by t = a + (b - a) u^2 (3 - 2u), which
    // clusters nodes at both ends of the interval
    let nodes_on = |a: f64, b: f64| -> Vec<(f64, f64)> {
        let h = 1.0 / panels as f64;
        let len = b - a;
        (0..panels)
            .flat_map(|k| {
                let mid = (k as f64 + 0.5) * h;
                rule.0.iter().zip(&rule.1).map(move |(xi, wi)| {
                    let u = mid + 0.5 * h * xi;
                    let map = u * u * (3.0 - 2.0 * u);
                    (a + len * map, 0.5 * h * wi * len * 6.0 * u * (1.0 - u))
                })
            })
            .collect()
    };
    let mut a_total = 0.0;
    let mut c_total = 0.0;
    for (t, wt) in nodes_on(0.0, 1.0) {
        let eta_t = ctx.eta(t);
        c_total += wt * eta_t * eta_t;
        if eta_t == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (s, ws) in nodes_on(0.0, t) {
            let eta_s = ctx.eta(s);
            if eta_s != 0.0 {
                inner += ws * eta_s * kernel_r(ctx, s, t)?;
            }
        }
        a_total += wt * eta_t * inner;
    }
    Ok((2.0 * a_total, c_total))
}

fn rel_change(coarse: f64, fine: f64) -> f64 {
    if coarse == fine {
        0.0
    } else {
        (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE)
    }
}

/// Asymptotic variance of the minimum-distance shape estimator, checked by
/// doubling the panel count.
pub fn md_asymptotic_variance(ctx: &KernelContext) -> Result<AsymptoticVariance> {
    let (a0, c0) = variance_terms(ctx, VARIANCE_PANELS)?;
    let (a, c) = variance_terms(ctx, 2 * VARIANCE_PANELS)?;
    let (ra, rc) = (rel_change(a0, a), rel_change(c0, c));
    if !(ra <= VARIANCE_TOL && rc <= VARIANCE_TOL) {
        return Err(Error::NonConvergence(format!(
            "variance quadrature changed by {ra:.3e} (A) and {rc:.3e} (C) on refinement"
        )));
    }
    let sigma2 = if a == 0.0 { 0.0 } else { a / (c * c) };
    Ok(AsymptoticVariance {
        a,
        c,
        sigma2,
        panels: 2 * VARIANCE_PANELS,
        nodes: VARIANCE_NODES,
        rel_change_a: ra,
        rel_change_c: rc,
    })
}
