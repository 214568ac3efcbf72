#![allow(dead_code)]

use qcurve::{SortedSample, WeibullParams};
use rand_chacha::ChaCha8Rng;

pub fn draw(rng: &mut ChaCha8Rng, beta: f64, n: usize) -> SortedSample {
    let w = WeibullParams::new(beta, 1.0).unwrap();
    SortedSample::new(w.sample(rng, n).unwrap()).unwrap()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

pub fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0))
}

/// Kolmogorov-Smirnov distance of `v` from the continuous cdf `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(mut v: Vec<f64>, cdf: F) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}
