//! Imaginary time iteration: real projection, normalization, energy
//! estimators and the fixed- and variable-step drivers.

mod excited;
mod oracle;

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, Grid, TransformLedger, WaveFunction};
use crate::methods::Method;
use crate::potentials::Problem;
use crate::propagator::StepPlan;

pub use excited::{excited_states, Driver};
pub use oracle::{diagonalization_oracle, hamiltonian_matrix, Eigenpair, SpectralOracle};

/// Smallest step the variable controller will halve down to.
pub const H_FLOOR: f64 = 1e-6;
/// Iteration cap of the variable controller.
pub const MAX_ITERATIONS: usize = 1_000_000;

/// Energy estimates after one projected step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimates {
    /// Rayleigh quotient of the normalized iterate.
    pub e1: f64,
    /// Norm-loss estimate `-ln(|Re(Psi u)|) / h`.
    pub e2: f64,
    /// `e2 - e1`, scales like `h^p`.
    pub de: f64,
    /// Change of `e1` since the previous step, scales like `h^{2p}`.
    pub dde: Option<f64>,
}

impl EnergyEstimates {
    pub fn new(e1: f64, e2: f64, previous_e1: Option<f64>) -> Self {
        Self { e1, e2, de: e2 - e1, dde: previous_e1.map(|p| e1 - p) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub step: usize,
    pub h: f64,
    pub estimates: EnergyEstimates,
    /// Cumulative transform units after this step.
    pub units: u64,
    /// Distance to the reference state, when one was supplied.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The fixed-step run reached its final time.
    FinalTime,
    Tolerance,
    MaxIterations,
    HFloor,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub final_state: WaveFunction,
    pub e0_estimate: f64,
    pub history: Vec<HistoryEntry>,
    pub terminated_by: Termination,
    pub ledger: TransformLedger,
}

impl SolveReport {
    pub fn last(&self) -> &HistoryEntry {
        self.history.last().expect("a report always holds at least one step")
    }
}

/// Independent uniform `[0, 1)` amplitudes from a seeded generator, normalized.
pub fn random_initial(grid: &Arc<Grid>, seed: u64) -> WaveFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state(grid, &mut rng)
}

pub(crate) fn random_state(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> WaveFunction {
    let values: Vec<f64> = (0..grid.len()).map(|_| rng.random::<f64>()).collect();
    let mut w = WaveFunction::from_real(grid.clone(), &values).expect("sizes match");
    w.normalize().expect("uniform draws are not all zero");
    w
}

/// Drop imaginary parts and normalize; returns the norm of the real part.
pub fn project_and_normalize(w: &mut WaveFunction) -> Result<f64> {
    project_real(w);
    let norm = w.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!("projected state has norm {norm}")));
    }
    w.normalize()?;
    Ok(norm)
}

pub(crate) fn project_real(w: &mut WaveFunction) {
    let values = w.real_parts();
    *w = WaveFunction::from_real(w.grid().clone(), &values).expect("sizes match");
}

/// `H u` on the grid, with the kinetic part applied spectrally.
pub fn apply_hamiltonian(u: &WaveFunction, problem: &Problem) -> Vec<Complex64> {
    let mut k = u.clone();
    // Energy evaluation is bookkeeping, not propagation, so its transforms go to a scratch ledger.
    let mut scratch = TransformLedger::new();
    forward_transform(&mut k, &mut scratch).expect("coordinate-space input");
    let grid = u.grid().clone();
    for (a, &kap) in k.amplitudes_mut().iter_mut().zip(grid.wavenumbers()) {
        *a *= 0.5 * kap * kap;
    }
    inverse_transform(&mut k, &mut scratch).expect("momentum-space data");
    k.amplitudes()
        .iter()
        .zip(u.amplitudes())
        .zip(problem.total_potential().values())
        .map(|((t, x), &v)| t + x * v)
        .collect()
}

/// Rayleigh quotient `<u, H u> / <u, u>` in the `dx`-weighted inner product.
pub fn rayleigh_energy(u: &WaveFunction, problem: &Problem) -> f64 {
    let hu = apply_hamiltonian(u, problem);
    let dx = u.grid().dx();
    let num: f64 = u.amplitudes().iter().zip(&hu).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * dx;
    num / (u.norm() * u.norm())
}

/// `-ln(norm) / h`.
pub fn norm_loss_energy(pre_projection_norm: f64, h: f64) -> Result<f64> {
    if !(pre_projection_norm > 0.0) {
        return Err(Error::Degenerate(format!("norm {pre_projection_norm} carries no energy information")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step size must be positive, got {h}")));
    }
    Ok(-pre_projection_norm.ln() / h)
}

/// `dx`-weighted distance between two real states after aligning the sign of `phi`.
pub fn state_error(reference: &WaveFunction, phi: &WaveFunction) -> f64 {
    let sign = if reference.inner(phi).re < 0.0 { -1.0 } else { 1.0 };
    let dx = reference.grid().dx();
    let s: f64 = reference
        .amplitudes()
        .iter()
        .zip(phi.amplitudes())
        .map(|(r, p)| (r - p * sign).norm_sqr())
        .sum();
    (s * dx).sqrt()
}

/// One planned step, real projection and normalization. Returns the norm before normalization.
pub fn projected_step(plan: &StepPlan, u: &mut WaveFunction, ledger: &mut TransformLedger) -> Result<f64> {
    plan.apply(u, ledger)?;
    project_and_normalize(u)
}

/// Options shared by the drivers.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Reference state for per-step error tracking.
    pub reference: Option<WaveFunction>,
    /// Compute energy estimates every step (otherwise only after the last).
    pub every_step: bool,
}

fn steps_for(h: f64, t_final: f64) -> Result<usize> {
    if !(h > 0.0) || !(t_final > 0.0) {
        return Err(Error::Domain(format!("need h > 0 and T > 0, got h = {h}, T = {t_final}")));
    }
    let m = (t_final / h).round();
    if m < 1.0 || ((m * h - t_final).abs() > 1e-9 * t_final) {
        return Err(Error::Domain(format!("step {h} does not divide the final time {t_final}")));
    }
    Ok(m as usize)
}

/// Fixed-step propagation to `t_final` from seeded random data.
pub fn itp_fixed(method: &Method, problem: &Problem, h: f64, t_final: f64, seed: u64) -> Result<SolveReport> {
    let options = RunOptions { every_step: true, ..RunOptions::default() };
    itp_fixed_from(method, problem, h, t_final, random_initial(problem.grid(), seed), &options)
}

pub fn itp_fixed_from(
    method: &Method,
    problem: &Problem,
    h: f64,
    t_final: f64,
    initial: WaveFunction,
    options: &RunOptions,
) -> Result<SolveReport> {
    let steps = steps_for(h, t_final)?;
    let mut u = initial;
    project_and_normalize(&mut u)?;
    let plan = StepPlan::new(method, problem, h)?;
    let mut ledger = TransformLedger::new();
    let mut history = Vec::with_capacity(if options.every_step { steps } else { 1 });
    let mut previous_e1 = None;
    for n in 1..=steps {
        let pre = projected_step(&plan, &mut u, &mut ledger)?;
        if options.every_step || n == steps || n + 1 == steps {
            let e1 = rayleigh_energy(&u, problem);
            let est = EnergyEstimates::new(e1, norm_loss_energy(pre, h)?, previous_e1);
            previous_e1 = Some(e1);
            if options.every_step || n == steps {
                history.push(HistoryEntry {
                    step: n,
                    h,
                    estimates: est,
                    units: ledger.units(),
                    error: options.reference.as_ref().map(|r| state_error(r, &u)),
                });
            }
        }
    }
    let e0_estimate = history.last().map(|e| e.estimates.e1).expect("at least one step");
    Ok(SolveReport { final_state: u, e0_estimate, history, terminated_by: Termination::FinalTime, ledger })
}

/// Settings of the step-halving controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariableSettings {
    pub tol: f64,
    pub h0: f64,
    pub h_floor: f64,
    pub max_iterations: usize,
}

impl VariableSettings {
    pub fn new(tol: f64, h0: f64) -> Self {
        Self { tol, h0, h_floor: H_FLOOR, max_iterations: MAX_ITERATIONS }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.h0 > 0.0) {
            return Err(Error::Domain(format!("need tol > 0 and h0 > 0, got {} and {}", self.tol, self.h0)));
        }
        Ok(())
    }
}

/// What the controller does after a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Control {
    Stop(Termination),
    Halve,
    Keep,
}

/// Stop once `|dE| < tol`; halve `h` when `|ddE| < dE^2`.
pub(crate) fn control(de: f64, dde: Option<f64>, h: f64, iteration: usize, settings: &VariableSettings) -> Control {
    if de.abs() < settings.tol {
        return Control::Stop(Termination::Tolerance);
    }
    if iteration >= settings.max_iterations {
        return Control::Stop(Termination::MaxIterations);
    }
    match dde {
        Some(d) if d.abs() < de * de => {
            if h / 2.0 < settings.h_floor {
                Control::Stop(Termination::HFloor)
            } else {
                Control::Halve
            }
        }
        _ => Control::Keep,
    }
}

/// Variable-step iteration from seeded random data.
pub fn itp_variable(method: &Method, problem: &Problem, tol: f64, h0: f64, seed: u64) -> Result<SolveReport> {
    itp_variable_from(
        method,
        problem,
        random_initial(problem.grid(), seed),
        &VariableSettings::new(tol, h0),
        None,
    )
}

pub fn itp_variable_from(
    method: &Method,
    problem: &Problem,
    initial: WaveFunction,
    settings: &VariableSettings,
    reference: Option<&WaveFunction>,
) -> Result<SolveReport> {
    settings.validate()?;
    let mut u = initial;
    project_and_normalize(&mut u)?;
    let mut ledger = TransformLedger::new();
    let mut plan = StepPlan::new(method, problem, settings.h0)?;
    let mut previous_e1 = None;
    let mut history = Vec::new();
    let mut iteration = 0;
    let terminated_by = loop {
        iteration += 1;
        let h = plan.h();
        let pre = projected_step(&plan, &mut u, &mut ledger)?;
        let e1 = rayleigh_energy(&u, problem);
        let est = EnergyEstimates::new(e1, norm_loss_energy(pre, h)?, previous_e1);
        previous_e1 = Some(e1);
        history.push(HistoryEntry {
            step: iteration,
            h,
            estimates: est,
            units: ledger.units(),
            error: reference.map(|r| state_error(r, &u)),
        });
        match control(est.de, est.dde, h, iteration, settings) {
            Control::Stop(t) => break t,
            Control::Halve => plan = StepPlan::new(method, problem, h / 2.0)?,
            Control::Keep => {}
        }
    };
    let e0_estimate = history.last().map(|e| e.estimates.e1).expect("at least one step");
    Ok(SolveReport { final_state: u, e0_estimate, history, terminated_by, ledger })
}
