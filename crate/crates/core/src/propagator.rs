//! Exponentials of the split operators and one full splitting step.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, Space, TransformLedger, WaveFunction};
use crate::methods::{Method, Operator, Stage};
use crate::potentials::{Potential, Problem, Split};

/// Per-run mutable state of the stepper.
#[derive(Debug, Clone, Default)]
pub struct StepContext {
    pub ledger: TransformLedger,
    /// Trailing potential exponential `(z, c h^3)` held back for merging into the next step.
    pending_b: Option<(Complex64, Complex64)>,
    concatenate: bool,
}

impl StepContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Merge the closing B exponential of a VTV step with the opening one of the next step.
    pub fn with_concatenation() -> Self {
        Self { concatenate: true, ..Self::default() }
    }

    pub fn pending_b(&self) -> Option<(Complex64, Complex64)> {
        self.pending_b
    }

    /// Apply any held-back potential exponential.
    pub fn flush(&mut self, w: &mut WaveFunction, problem: &Problem) -> Result<()> {
        if let Some((z, c3)) = self.pending_b.take() {
            apply_potential_exp(w, z, problem.b_potential(), c3)?;
        }
        Ok(())
    }
}

fn require_coordinates(w: &WaveFunction) -> Result<()> {
    if w.space() != Space::Coordinate {
        return Err(Error::State("stage needs a coordinate-space state".into()));
    }
    Ok(())
}

/// `w_j <- exp(-z V_j - c3 (V'_j)^2) w_j`, where `c3` already includes `h^3`.
pub fn apply_potential_exp(w: &mut WaveFunction, z: Complex64, v: &Potential, c3: Complex64) -> Result<()> {
    require_coordinates(w)?;
    if v.len() != w.amplitudes().len() {
        return Err(Error::Config("potential and state sizes differ".into()));
    }
    let stays_real = w.is_real() && z.im == 0.0 && c3.im == 0.0;
    let amps = w.amplitudes_mut_keep_flag();
    if c3 == Complex64::new(0.0, 0.0) {
        for (a, &vj) in amps.iter_mut().zip(v.values()) {
            *a *= (-z * vj).exp();
        }
    } else {
        let g = v
            .grad_sq()
            .ok_or_else(|| Error::Config("modified potential stage needs (dV/dx)^2".into()))?;
        for ((a, &vj), &gj) in amps.iter_mut().zip(v.values()).zip(g) {
            *a *= (-z * vj - c3 * gj).exp();
        }
    }
    w.set_real_flag(stays_real);
    Ok(())
}

/// Multiply the spectrum by `f(kappa)` between a forward and an inverse transform.
fn spectral_multiply(
    w: &mut WaveFunction,
    ledger: &mut TransformLedger,
    real_multiplier: bool,
    f: impl Fn(f64) -> Complex64,
) -> Result<()> {
    forward_transform(w, ledger)?;
    let grid = w.grid().clone();
    let stays_real = w.is_real() && real_multiplier;
    for (a, &k) in w.amplitudes_mut_keep_flag().iter_mut().zip(grid.wavenumbers()) {
        *a *= f(k);
    }
    w.set_real_flag(stays_real);
    inverse_transform(w, ledger)
}

fn check_kinetic(z: Complex64) -> Result<()> {
    if z.re < 0.0 || (z.re == 0.0 && z.im != 0.0) {
        return Err(Error::Stability(format!(
            "kinetic exponential with Re(z) = {} would run diffusion backwards",
            z.re
        )));
    }
    Ok(())
}

/// Coefficients of `x^2` and `kappa^2` in the exact oscillator kernel.
fn ho_coefficients(h: Complex64, omega: f64) -> Result<(Complex64, Complex64)> {
    if !(h.re > 0.0) || (h.im * omega).abs() >= PI {
        return Err(Error::Stability(format!(
            "oscillator kernel needs Re(h) > 0 and |Im(h) omega| < pi, got h = {h}, omega = {omega}"
        )));
    }
    let hw = h * omega;
    Ok((0.5 * omega * (0.5 * hw).tanh(), hw.sinh() / (2.0 * omega)))
}

/// `exp(-z T)` with `T = -1/2 d^2/dx^2`, applied in momentum space.
pub fn apply_kinetic_exp(w: &mut WaveFunction, z: Complex64, ledger: &mut TransformLedger) -> Result<()> {
    require_coordinates(w)?;
    check_kinetic(z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(());
    }
    spectral_multiply(w, ledger, z.im == 0.0, |k| (-z * (0.5 * k * k)).exp())
}

/// Exact `exp(-h H_HO)` for `H_HO = p^2/2 + omega^2 x^2/2` as a
/// coordinate / momentum / coordinate product.
pub fn apply_ho_exp(w: &mut WaveFunction, h: Complex64, omega: f64, ledger: &mut TransformLedger) -> Result<()> {
    require_coordinates(w)?;
    let (x_coef, p_coef) = ho_coefficients(h, omega)?;
    let real = h.im == 0.0;
    let grid = w.grid().clone();
    let outer = |w: &mut WaveFunction| {
        let stays_real = w.is_real() && real;
        for (a, &x) in w.amplitudes_mut_keep_flag().iter_mut().zip(grid.nodes()) {
            *a *= (-x_coef * (x * x)).exp();
        }
        w.set_real_flag(stays_real);
    };
    outer(w);
    spectral_multiply(w, ledger, real, |k| (-p_coef * (k * k)).exp())?;
    outer(w);
    Ok(())
}

fn apply_a(w: &mut WaveFunction, problem: &Problem, z: Complex64, ledger: &mut TransformLedger) -> Result<()> {
    match problem.split() {
        Split::Full => apply_kinetic_exp(w, z, ledger),
        Split::NearIntegrable { omega, .. } => apply_ho_exp(w, z, *omega, ledger),
    }
}

/// One step of `method` with step size `h`.
///
/// Complex-coefficient methods run in complex arithmetic throughout, so every
/// transform they perform is charged at the complex rate.
pub fn step(method: &Method, problem: &Problem, w: &mut WaveFunction, h: f64, ctx: &mut StepContext) -> Result<()> {
    step_sequence(&method.expand().stages, method.is_complex(), problem, w, h, ctx)
}

pub(crate) fn step_sequence(
    stages: &[Stage],
    complex: bool,
    problem: &Problem,
    w: &mut WaveFunction,
    h: f64,
    ctx: &mut StepContext,
) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step size must be positive, got {h}")));
    }
    require_coordinates(w)?;
    if complex {
        w.mark_complex();
    }
    let h3 = h * h * h;
    let last = stages.len().saturating_sub(1);
    for (i, stage) in stages.iter().enumerate() {
        match stage.op {
            Operator::A => {
                ctx.flush(w, problem)?;
                apply_a(w, problem, stage.weight * h, &mut ctx.ledger)?;
            }
            Operator::B => {
                let mut z = stage.weight * h;
                let mut c3 = stage.modified_weight * h3;
                if let Some((pz, pc)) = ctx.pending_b.take() {
                    z += pz;
                    c3 += pc;
                }
                if i == last && ctx.concatenate {
                    ctx.pending_b = Some((z, c3));
                } else {
                    apply_potential_exp(w, z, problem.b_potential(), c3)?;
                }
            }
        }
    }
    Ok(())
}

/// Diagonal multiplier together with whether it is real.
#[derive(Debug, Clone)]
struct Factor {
    values: Vec<Complex64>,
    real: bool,
}

impl Factor {
    fn new(values: Vec<Complex64>) -> Self {
        let real = values.iter().all(|z| z.im == 0.0);
        Self { values, real }
    }

    fn merge(&mut self, other: &Factor) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a *= b;
        }
        self.real &= other.real;
    }

    fn apply(&self, w: &mut WaveFunction) {
        let stays_real = w.is_real() && self.real;
        for (a, f) in w.amplitudes_mut_keep_flag().iter_mut().zip(&self.values) {
            *a *= f;
        }
        w.set_real_flag(stays_real);
    }
}

#[derive(Debug, Clone)]
enum PlannedOp {
    Coordinate(Factor),
    Momentum(Factor),
}

/// One step of a method at a fixed `h` with every exponential tabulated.
///
/// Adjacent coordinate-space factors are multiplied together up front, which
/// merges the outer factors of the oscillator kernel with the potential stages.
#[derive(Debug, Clone)]
pub struct StepPlan {
    h: f64,
    complex: bool,
    ops: Vec<PlannedOp>,
}

impl StepPlan {
    pub fn new(method: &Method, problem: &Problem, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Domain(format!("step size must be positive, got {h}")));
        }
        let grid = problem.grid();
        let h3 = h * h * h;
        let mut raw = Vec::new();
        for stage in &method.expand().stages {
            let z = stage.weight * h;
            match (stage.op, problem.split()) {
                (Operator::B, _) => {
                    let c3 = stage.modified_weight * h3;
                    let v = problem.b_potential();
                    let values = if c3 == Complex64::new(0.0, 0.0) {
                        v.values().iter().map(|&vj| (-z * vj).exp()).collect()
                    } else {
                        let g = v
                            .grad_sq()
                            .ok_or_else(|| Error::Config("modified potential stage needs (dV/dx)^2".into()))?;
                        v.values().iter().zip(g).map(|(&vj, &gj)| (-z * vj - c3 * gj).exp()).collect()
                    };
                    raw.push(PlannedOp::Coordinate(Factor::new(values)));
                }
                (Operator::A, Split::Full) => {
                    check_kinetic(z)?;
                    let values = grid.wavenumbers().iter().map(|&k| (-z * (0.5 * k * k)).exp()).collect();
                    raw.push(PlannedOp::Momentum(Factor::new(values)));
                }
                (Operator::A, Split::NearIntegrable { omega, .. }) => {
                    let (x_coef, p_coef) = ho_coefficients(z, *omega)?;
                    let outer = Factor::new(grid.nodes().iter().map(|&x| (-x_coef * (x * x)).exp()).collect());
                    let middle = grid.wavenumbers().iter().map(|&k| (-p_coef * (k * k)).exp()).collect();
                    raw.push(PlannedOp::Coordinate(outer.clone()));
                    raw.push(PlannedOp::Momentum(Factor::new(middle)));
                    raw.push(PlannedOp::Coordinate(outer));
                }
            }
        }
        let mut ops: Vec<PlannedOp> = Vec::with_capacity(raw.len());
        for op in raw {
            match (ops.last_mut(), op) {
                (Some(PlannedOp::Coordinate(prev)), PlannedOp::Coordinate(f)) => prev.merge(&f),
                (_, op) => ops.push(op),
            }
        }
        Ok(Self { h, complex: method.is_complex(), ops })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn apply(&self, w: &mut WaveFunction, ledger: &mut TransformLedger) -> Result<()> {
        require_coordinates(w)?;
        if self.complex {
            w.mark_complex();
        }
        for op in &self.ops {
            match op {
                PlannedOp::Coordinate(f) => f.apply(w),
                PlannedOp::Momentum(f) => {
                    forward_transform(w, ledger)?;
                    f.apply(w);
                    inverse_transform(w, ledger)?;
                }
            }
        }
        Ok(())
    }
}
