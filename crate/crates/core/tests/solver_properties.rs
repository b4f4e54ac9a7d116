//! End-to-end properties of the fixed- and variable-step solvers.

mod common;

use common::loglog_slope;
use itp::grid::make_grid;
use itp::methods::{catalog, empirical_order, OrderScan, CATALOG_NAMES};
use itp::potentials::{harmonic, perturbed_ho_problem, poschl_teller_problem, Problem};
use itp::solver::{
    diagonalization_oracle, itp_fixed, itp_fixed_from, itp_variable, random_initial, state_error, RunOptions,
    Termination,
};

fn pt() -> Problem {
    poschl_teller_problem(make_grid(-10.0, 10.0, 128).unwrap(), 10.0).unwrap()
}

fn ground(p: &Problem) -> itp::grid::WaveFunction {
    diagonalization_oracle(p, 1).unwrap().remove(0).state
}

#[test]
fn strang_fixed_step_error() {
    let p = pt();
    let r = itp_fixed(&catalog("strang").unwrap(), &p, 0.01, 100.0, 1).unwrap();
    let err = state_error(&ground(&p), &r.final_state);
    assert!(err < 1e-3, "{err}");
    assert_eq!(r.terminated_by, Termination::FinalTime);
    assert_eq!(r.history.len(), 10_000);
}

#[test]
fn strang_halving_quarters_the_error() {
    let p = pt();
    let reference = ground(&p);
    let m = catalog("strang").unwrap();
    let err = |h: f64| state_error(&reference, &itp_fixed(&m, &p, h, 50.0, 2).unwrap().final_state);
    let ratio = err(0.1) / err(0.05);
    assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
}

#[test]
fn history_is_consistent() {
    let p = pt();
    let r = itp_fixed(&catalog("chin4m").unwrap(), &p, 0.05, 50.0, 3).unwrap();
    assert!(r.history.windows(2).all(|w| w[1].units > w[0].units));
    // E1 is variational and nonincreasing once the first steps have smoothed the data
    let skip = r.history.len() / 10;
    for w in r.history[skip..].windows(2) {
        assert!(w[1].estimates.e1 <= w[0].estimates.e1 + 1e-14);
    }
    let last = r.last().estimates;
    assert!(last.dde.unwrap().abs() < 1e-3 * last.de.abs());
}

#[test]
fn variable_step_reaches_ground_state() {
    let p = pt();
    let r = itp_variable(&catalog("v864_7").unwrap(), &p, 1e-10, 10.0, 1).unwrap();
    assert_eq!(r.terminated_by, Termination::Tolerance);
    let err = state_error(&ground(&p), &r.final_state);
    assert!(err < 1e-8, "{err}");
    assert!(r.history.windows(2).all(|w| w[1].units > w[0].units));
}

#[test]
fn error_shrinks_with_h_for_every_method() {
    let p = pt();
    let reference = ground(&p);
    let u = random_initial(p.grid(), 5);
    for name in CATALOG_NAMES {
        let m = catalog(name).unwrap();
        let errs: Vec<f64> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&h| {
                let r = itp_fixed_from(&m, &p, h, 40.0, u.clone(), &RunOptions::default()).unwrap();
                state_error(&reference, &r.final_state)
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0] || w[0] < 1e-11, "{name}: {errs:?}");
        }
    }
}

#[test]
fn conjugate_runs_project_identically() {
    let p = pt();
    let u = random_initial(p.grid(), 9);
    for name in CATALOG_NAMES {
        let m = catalog(name).unwrap();
        if !m.is_complex() {
            continue;
        }
        let opts = RunOptions::default();
        let a = itp_fixed_from(&m, &p, 0.25, 5.0, u.clone(), &opts).unwrap();
        let b = itp_fixed_from(&m.conjugate(), &p, 0.25, 5.0, u.clone(), &opts).unwrap();
        let gap = state_error(&a.final_state, &b.final_state);
        assert!(gap < 1e-13, "{name}: {gap:e}");
    }
}

#[test]
fn oracle_matches_analytic_spectra() {
    let g = make_grid(-10.0, 10.0, 128).unwrap();
    let ho = Problem::full(g.clone(), harmonic(&g, 1.0).unwrap()).unwrap();
    let levels = diagonalization_oracle(&ho, 2).unwrap();
    assert!((levels[0].energy - 0.5).abs() < 1e-10);
    assert!((levels[1].energy - 1.5).abs() < 1e-8);

    // The n = 2 state decays like exp(-0.7 |x|), so its periodic images need a wider box.
    let lambda = (-1.0 + 41f64.sqrt()) / 2.0;
    let wide = poschl_teller_problem(make_grid(-40.0, 40.0, 512).unwrap(), 10.0).unwrap();
    let pairs = diagonalization_oracle(&wide, 4).unwrap();
    for (n, pair) in pairs.iter().take(3).enumerate() {
        let exact = 5.0 - (lambda - n as f64).powi(2) / 2.0;
        assert!((pair.energy - exact).abs() < 1e-7, "n = {n}: {} vs {exact}", pair.energy);
    }
    assert!(pairs[3].energy > 5.0 - 1e-12, "no fourth bound state");
    for i in 0..4 {
        for j in 0..4 {
            let ip = pairs[i].state.inner(&pairs[j].state).re;
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-12);
        }
    }
}

#[test]
fn measured_orders() {
    let scan = OrderScan::default();
    let g = make_grid(-10.0, 10.0, 128).unwrap();

    let strang = empirical_order(&catalog("strang").unwrap(), &pt(), &scan).unwrap();
    assert!((strang.slope - 2.0).abs() <= 0.2 && !strang.warning, "{strang:?}");

    // (8,6,4) behaves as a fourth-order scheme when the potential is not a small perturbation
    let ho = Problem::full(g.clone(), harmonic(&g, 1.0).unwrap()).unwrap();
    let v864 = empirical_order(&catalog("v864_7").unwrap(), &ho, &scan).unwrap();
    assert!((v864.slope - 4.0).abs() <= 0.3, "{v864:?}");

    let pert = perturbed_ho_problem(g, 1.0, 0.4).unwrap();
    let v86 = empirical_order(&catalog("v86_9").unwrap(), &pert, &scan).unwrap();
    assert!(v86.slope >= 5.5, "{v86:?}");
}

#[test]
fn energy_estimates_scale_with_order() {
    let p = pt();
    let m = catalog("strang").unwrap();
    let pts: Vec<(f64, f64)> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&h| (h, itp_fixed(&m, &p, h, 40.0, 1).unwrap().last().estimates.de.abs()))
        .collect();
    let s = loglog_slope(&pts);
    assert!((s - 2.0).abs() < 0.3, "{s}");
}
