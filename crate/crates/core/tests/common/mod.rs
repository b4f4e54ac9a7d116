//! Helpers shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use itp::methods::{Method, Operator};

pub type CMat = DMatrix<Complex64>;

/// A pair of random symmetric 6x6 matrices with entries of order one.
pub fn random_pair(seed: u64) -> (CMat, CMat) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sym = || {
        let m = DMatrix::<f64>::from_fn(6, 6, |_, _| rng.random::<f64>() - 0.5);
        (&m + m.transpose()).map(|x| Complex64::new(x, 0.0))
    };
    (sym(), sym())
}

pub fn commutator(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

/// The method applied to `exp(-h (A + B))`, with `[B, [A, B]]` in the modified stages.
pub fn method_product(m: &Method, a: &CMat, b: &CMat, h: f64) -> CMat {
    let bab = commutator(b, &commutator(a, b));
    let h = Complex64::new(h, 0.0);
    let mut p = CMat::identity(a.nrows(), a.ncols());
    for s in &m.expand().stages {
        let exponent = match s.op {
            Operator::A => a * (-h * s.weight),
            Operator::B => b * (-h * s.weight) - &bab * (h * h * h * s.modified_weight),
        };
        p = exponent.exp() * p;
    }
    p
}

pub fn exact(a: &CMat, b: &CMat, h: f64) -> CMat {
    ((a + b) * Complex64::new(-h, 0.0)).exp()
}

/// Spectral norm bound via the Frobenius norm.
pub fn norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
