//! Quantile concentration curves and their estimation.
//!
//! The qZ and qD curves of a nonnegative distribution with quantile
//! function `Q` are
//!
//! ```text
//! qZ(p) = 1 - Q(p/2) / Q((1+p)/2)
//! qD(p) = 1 - Q(p/2) / Q(1-p/2)
//! ```
//!
//! with `qZ(0) = qZ(1) = qD(0) = 1` and `qD(1) = 0`. Their areas over
//! `[0, 1]` are the qZI and qDI concentration indices.
//!
//! The crate provides
//! - generic curve evaluation from any [`QuantileFunction`] ([`curves`]),
//! - empirical and plotting-position quantile estimators ([`empirical_qf`]),
//! - the Weibull model with closed-form curves ([`weibull`]),
//! - Weibull shape estimators ([`shape_estimators`]) and minimum-distance
//!   fits of the curves ([`md_estimation`]),
//! - asymptotic variance of the minimum-distance estimator ([`asymptotics`]),
//! - a seeded Monte Carlo harness ([`simulation`]) and an Anderson-Darling
//!   goodness-of-fit test ([`gof`]).

pub mod asymptotics;
pub mod curves;
pub mod empirical_qf;
mod error;
pub mod gof;
pub mod md_estimation;
pub mod optimize;
pub mod quadrature;
pub mod rng;
pub mod shape_estimators;
pub mod simulation;
pub mod weibull;

pub use curves::{CurveKind, CurveSamples};
pub use empirical_qf::{QuantileFunction, SortedSample};
pub use error::{Error, Result};
pub use md_estimation::{MdConfig, Reference};
pub use shape_estimators::{EstimateResult, Method};
pub use weibull::WeibullParams;
