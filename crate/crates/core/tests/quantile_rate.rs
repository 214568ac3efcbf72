mod common;

use qcurve::empirical_qf::{EmpiricalQf, PlottingPositionQf};
use qcurve::rng::child_rng;
use qcurve::{QuantileFunction, SortedSample};
use rand::Rng;

const SIZES: [usize; 4] = [50, 100, 200, 400];

/// `sup |Q_n - Q_n^HF|` over 2001 points of `[lo, hi]` plus both sides of
/// every jump `k/n` inside it.
fn sup_gap(x: &SortedSample, lo: f64, hi: f64) -> f64 {
    let n = x.len();
    let e = EmpiricalQf::new(x);
    let h = PlottingPositionQf::hf(x);
    let mut ps: Vec<f64> = (0..=2000).map(|i| lo + (hi - lo) * i as f64 / 2000.0).collect();
    for k in 1..n {
        let b = k as f64 / n as f64;
        if b > lo && b < hi {
            ps.extend([b - 1e-9, b + 1e-9]);
        }
    }
    ps.iter()
        .map(|p| (e.quantile(*p).unwrap() - h.quantile(*p).unwrap()).abs())
        .fold(0.0, f64::max)
}

fn medians<F: Fn(usize, u64) -> SortedSample>(draw: F, lo: f64, hi: f64, scale: fn(usize) -> f64) -> Vec<f64> {
    SIZES
        .iter()
        .map(|&n| common::median((0..200).map(|r| scale(n) * sup_gap(&draw(n, r), lo, hi)).collect()))
        .collect()
}

fn uniform(n: usize, r: u64) -> SortedSample {
    let mut rng = child_rng(77, (n as u64) << 32 | r);
    SortedSample::new((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

fn weibull(n: usize, r: u64) -> SortedSample {
    common::draw(&mut child_rng(78, (n as u64) << 32 | r), 1.5, n)
}

#[test]
fn gap_is_of_order_log_n_over_n_for_bounded_support() {
    // max spacing of n uniforms is of order ln(n) / n
    let m = medians(uniform, 0.0, 1.0, |n| n as f64 / (n as f64).ln());
    assert!(m[3] / m[0] < 1.25, "{m:?}");
    let raw = medians(uniform, 0.0, 1.0, |n| n as f64);
    assert!(raw.windows(2).all(|w| w[1] < 1.5 * w[0]), "{raw:?}");
}

#[test]
fn gap_vanishes_on_inner_interval_for_unbounded_support() {
    let m = medians(weibull, 0.05, 0.95, |_| 1.0);
    assert!(m.windows(2).all(|w| w[1] < w[0]), "{m:?}");
    assert!(m[3] < 0.5 * m[0], "{m:?}");
}

#[test]
fn gap_over_whole_interval_is_driven_by_the_top_spacing() {
    // the top spacing of an unbounded sample does not shrink, so n * sup
    // grows roughly linearly over [0, 1]
    let m = medians(weibull, 0.0, 1.0, |n| n as f64);
    assert!(m[3] / m[0] > 4.0, "{m:?}");
}
