//! Several low-lying states at once, kept orthonormal by Gram-Schmidt after each step.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    control, norm_loss_energy, project_real, random_state, rayleigh_energy, steps_for, Control, EnergyEstimates,
    Eigenpair, Termination, VariableSettings,
};
use crate::error::{Error, Result};
use crate::grid::{TransformLedger, WaveFunction};
use crate::methods::Method;
use crate::potentials::Problem;
use crate::propagator::StepPlan;

/// Most states one run will track.
pub const MAX_STATES: usize = 8;

/// Relative norm below which an orthogonalized state counts as lost.
const RANK_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Driver {
    Fixed { h: f64, t_final: f64 },
    Variable(VariableSettings),
}

#[derive(Debug, Clone)]
pub struct ExcitedStates {
    /// Ascending in energy.
    pub pairs: Vec<Eigenpair>,
    pub steps: usize,
    pub terminated_by: Termination,
    pub ledger: TransformLedger,
}

/// Subtract projections on `basis` (orthonormal) and return the remaining norm.
fn orthogonalize(w: &mut WaveFunction, basis: &[WaveFunction]) -> f64 {
    for b in basis {
        let c = b.inner(w);
        for (x, y) in w.amplitudes_mut_keep_flag().iter_mut().zip(b.amplitudes()) {
            *x -= c * y;
        }
    }
    w.norm()
}

/// Orthogonalize against `done`, redrawing from `rng` while the result is numerically zero.
fn orthonormal_into(mut w: WaveFunction, done: &[WaveFunction], rng: &mut ChaCha8Rng) -> Result<(WaveFunction, f64, bool)> {
    let mut redrawn = false;
    for _ in 0..16 {
        let before = w.norm();
        let after = orthogonalize(&mut w, done);
        if after > RANK_TOLERANCE * before && after.is_finite() {
            w.normalize()?;
            return Ok((w, after, redrawn));
        }
        log::warn!("state {} lost rank during orthogonalization, redrawing it", done.len());
        redrawn = true;
        w = random_state(w.grid(), rng);
    }
    Err(Error::Degenerate(format!("could not find a state orthogonal to {} others", done.len())))
}

/// The `k` lowest states by simultaneous iteration.
///
/// With `k = 1` and a variable driver this follows the same path as the single-state solver.
pub fn excited_states(method: &Method, problem: &Problem, k: usize, driver: Driver, seed: u64) -> Result<ExcitedStates> {
    if k == 0 || k > MAX_STATES {
        return Err(Error::Config(format!("number of states must be in 1..={MAX_STATES}, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states: Vec<WaveFunction> = Vec::with_capacity(k);
    for _ in 0..k {
        let w = random_state(problem.grid(), &mut rng);
        let (w, _, _) = orthonormal_into(w, &states, &mut rng)?;
        states.push(w);
    }

    let (mut h, fixed_steps, settings) = match driver {
        Driver::Fixed { h, t_final } => (h, Some(steps_for(h, t_final)?), None),
        Driver::Variable(s) => {
            s.validate()?;
            (s.h0, None, Some(s))
        }
    };

    let mut ledger = TransformLedger::new();
    let mut plan = StepPlan::new(method, problem, h)?;
    let mut previous: Vec<Option<f64>> = vec![None; k];
    let mut energies = vec![0.0; k];
    let mut iteration = 0;
    let terminated_by = loop {
        iteration += 1;
        let mut next: Vec<WaveFunction> = Vec::with_capacity(k);
        let mut estimates = Vec::with_capacity(k);
        let mut redrawn_any = false;
        for (i, mut w) in std::mem::take(&mut states).into_iter().enumerate() {
            plan.apply(&mut w, &mut ledger)?;
            project_real(&mut w);
            let (w, pre, redrawn) = orthonormal_into(w, &next, &mut rng)?;
            let e1 = rayleigh_energy(&w, problem);
            if redrawn {
                redrawn_any = true;
                previous[i] = None;
            } else {
                estimates.push(EnergyEstimates::new(e1, norm_loss_energy(pre, h)?, previous[i]));
                previous[i] = Some(e1);
            }
            energies[i] = e1;
            next.push(w);
        }
        states = next;

        match (fixed_steps, settings) {
            (Some(m), _) => {
                if iteration >= m {
                    break Termination::FinalTime;
                }
            }
            (None, Some(s)) => {
                if redrawn_any {
                    if iteration >= s.max_iterations {
                        break Termination::MaxIterations;
                    }
                    continue;
                }
                let de = estimates.iter().map(|e| e.de.abs()).fold(0.0, f64::max);
                let dde = estimates
                    .iter()
                    .map(|e| e.dde.map(f64::abs))
                    .try_fold(0.0, |acc: f64, d| d.map(|d| acc.max(d)));
                match control(de, dde, h, iteration, &s) {
                    Control::Stop(t) => break t,
                    Control::Halve => {
                        h /= 2.0;
                        plan = StepPlan::new(method, problem, h)?;
                    }
                    Control::Keep => {}
                }
            }
            (None, None) => unreachable!("a driver is always selected"),
        }
    };

    let mut pairs: Vec<Eigenpair> =
        energies.into_iter().zip(states).map(|(energy, state)| Eigenpair { energy, state }).collect();
    pairs.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(ExcitedStates { pairs, steps: iteration, terminated_by, ledger })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::methods::catalog;
    use crate::potentials::poschl_teller_problem;
    use crate::solver::{diagonalization_oracle, itp_variable, state_error};

    fn problem() -> Problem {
        poschl_teller_problem(make_grid(-10.0, 10.0, 128).unwrap(), 10.0).unwrap()
    }

    #[test]
    fn single_state_matches_solver() {
        let p = problem();
        let m = catalog("v864_7").unwrap();
        let solo = itp_variable(&m, &p, 1e-8, 10.0, 5).unwrap();
        let many = excited_states(&m, &p, 1, Driver::Variable(VariableSettings::new(1e-8, 10.0)), 5).unwrap();
        assert_eq!(many.steps, solo.history.len());
        assert_eq!(many.pairs[0].energy, solo.e0_estimate);
        assert_eq!(many.pairs[0].state.amplitudes(), solo.final_state.amplitudes());
    }

    #[test]
    fn two_lowest_states() {
        let p = problem();
        let oracle = diagonalization_oracle(&p, 2).unwrap();
        let m = catalog("v864_7").unwrap();
        let r = excited_states(&m, &p, 2, Driver::Fixed { h: 0.05, t_final: 20.0 }, 11).unwrap();
        assert_eq!(r.terminated_by, Termination::FinalTime);
        for (got, want) in r.pairs.iter().zip(&oracle) {
            assert!((got.energy - want.energy).abs() < 1e-8, "{} vs {}", got.energy, want.energy);
            assert!(state_error(&want.state, &got.state) < 1e-4);
        }
        assert!(r.pairs[0].state.inner(&r.pairs[1].state).norm() < 1e-12);
    }

    #[test]
    fn rank_deficiency_recovers() {
        let p = problem();
        let grid = p.grid().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let first = random_state(&grid, &mut rng);
        let (w, _, redrawn) = orthonormal_into(first.clone(), std::slice::from_ref(&first), &mut rng).unwrap();
        assert!(redrawn);
        assert!(w.inner(&first).norm() < 1e-12);
        assert!((w.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_count_limits() {
        let p = problem();
        let m = catalog("strang").unwrap();
        let d = Driver::Fixed { h: 0.5, t_final: 1.0 };
        assert!(excited_states(&m, &p, 0, d, 1).is_err());
        assert!(excited_states(&m, &p, 9, d, 1).is_err());
    }
}
