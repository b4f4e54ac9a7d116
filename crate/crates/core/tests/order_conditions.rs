//! Order conditions checked against products of matrix exponentials.

mod common;

use common::*;
use itp::methods::{catalog, third_order_residuals, CATALOG_NAMES};
use num_complex::Complex64;

#[test]
fn leading_error_matches_residuals() {
    // Psi_h - exp(-hH) = -h^3 (-r1/2 [A,[A,B]] + r2/2 [B,[A,B]]) + O(h^5) for symmetric schemes.
    let (a, b) = random_pair(3);
    let aab = commutator(&a, &commutator(&a, &b));
    let bab = commutator(&b, &commutator(&a, &b));
    // The difference of exponentials carries an O(h^4) cross term, so the relative miss is O(h).
    let h = 1e-3;
    for name in CATALOG_NAMES {
        let m = catalog(name).unwrap();
        let (r1, r2) = third_order_residuals(&m);
        let predicted = (&bab * (r2 * 0.5) - &aab * (r1 * 0.5)) * Complex64::new(-h * h * h, 0.0);
        let diff = method_product(&m, &a, &b, h) - exact(&a, &b, h);
        let scale = h * h * h * (1.0 + r1.norm() + r2.norm());
        let miss = norm(&(diff - predicted)) / scale;
        assert!(miss < h, "{name}: relative miss {miss:e}");
    }
}

#[test]
fn fourth_order_schemes_scale_as_h5() {
    let (a, b) = random_pair(11);
    for name in CATALOG_NAMES {
        let m = catalog(name).unwrap();
        if m.claimed_order().classical() < 4 {
            continue;
        }
        let pts: Vec<(f64, f64)> = [0.08, 0.04, 0.02]
            .iter()
            .map(|&h| (h, norm(&(method_product(&m, &a, &b, h) - exact(&a, &b, h)))))
            .collect();
        let slope = loglog_slope(&pts);
        assert!(slope > 4.7, "{name}: local error slope {slope}");
    }
}

#[test]
fn strang_is_third_order_locally() {
    let (a, b) = random_pair(5);
    let m = catalog("strang").unwrap();
    let pts: Vec<(f64, f64)> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&h| (h, norm(&(method_product(&m, &a, &b, h) - exact(&a, &b, h)))))
        .collect();
    let slope = loglog_slope(&pts);
    assert!((slope - 3.0).abs() < 0.05, "{slope}");
}

#[test]
fn conjugate_coefficients_give_conjugate_products() {
    let (a, b) = random_pair(8);
    for name in CATALOG_NAMES {
        let m = catalog(name).unwrap();
        if !m.is_complex() {
            continue;
        }
        let p = method_product(&m, &a, &b, 0.3);
        let q = method_product(&m.conjugate(), &a, &b, 0.3);
        assert!(norm(&(p.map(|z| z.conj()) - q)) < 1e-13, "{name}");
    }
}
