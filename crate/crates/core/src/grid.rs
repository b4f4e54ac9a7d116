//! Uniform periodic grid, wave functions and counted spectral transforms.
//!
//! The transform pair is scaled by `1/sqrt(N)` in both directions, so the
//! `dx`-weighted norm is the same in coordinate and momentum space.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic mesh on `[a, b)` with `n` nodes.
#[derive(Clone)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    dx: f64,
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("n", &self.n)
            .field("dx", &self.dx)
            .finish()
    }
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::Domain(format!("interval [{a}, {b}] is empty or not finite")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "number of nodes must be a power of two and at least 4, got {n}"
            )));
        }
        let length = b - a;
        let dx = length / n as f64;
        let nodes = (0..n).map(|k| a + k as f64 * dx).collect();
        // Transform ordering: 0, 1, ..., N/2-1, -N/2, ..., -1.
        let half = (n / 2) as i64;
        let wavenumbers = (0..n as i64)
            .map(|k| {
                let m = if k < half { k } else { k - n as i64 };
                2.0 * PI * m as f64 / length
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self { a, b, n, dx, nodes, wavenumbers, forward, inverse })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Wavenumbers in transform ordering.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }
}

/// Convenience wrapper returning a shareable grid.
pub fn make_grid(a: f64, b: f64, n: usize) -> Result<Arc<Grid>> {
    Grid::new(a, b, n).map(Arc::new)
}

/// Which basis the amplitudes of a [`WaveFunction`] are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Coordinate,
    Momentum,
}

/// Transform cost accumulated in units of one real-data FFT.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TransformLedger {
    units: u64,
    transforms: u64,
}

impl TransformLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weighted cost: complex transforms count 2, real ones 1.
    pub fn units(&self) -> u64 {
        self.units
    }

    /// Number of transforms performed, regardless of data type.
    pub fn transforms(&self) -> u64 {
        self.transforms
    }

    pub fn charge(&mut self, real_data: bool) {
        self.transforms += 1;
        self.units += if real_data { 1 } else { 2 };
    }
}

/// Complex amplitudes on a grid.
///
/// `real` records that the coordinate-space data is known to be real; in
/// momentum space it means the spectrum is that of real data.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    grid: Arc<Grid>,
    amplitudes: Vec<Complex64>,
    space: Space,
    real: bool,
}

impl WaveFunction {
    pub fn new(grid: Arc<Grid>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::State(format!(
                "amplitude length {} does not match grid size {}",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amplitudes, space: Space::Coordinate, real: false })
    }

    pub fn from_real(grid: Arc<Grid>, values: &[f64]) -> Result<Self> {
        let amplitudes = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut w = Self::new(grid, amplitudes)?;
        w.real = true;
        Ok(w)
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::from_real(grid, &values).expect("length matches by construction")
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self { grid, amplitudes: vec![Complex64::new(0.0, 0.0); n], space: Space::Coordinate, real: true }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Mutable access clears the realness flag.
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        self.real = false;
        &mut self.amplitudes
    }

    pub(crate) fn amplitudes_mut_keep_flag(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Declare the data complex so that transforms are charged at the complex rate.
    pub fn mark_complex(&mut self) {
        self.real = false;
    }

    pub(crate) fn set_real_flag(&mut self, real: bool) {
        self.real = real;
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.re).collect()
    }

    /// `sqrt(dx * sum |w_j|^2)`, valid in either space under the unitary scaling.
    pub fn norm(&self) -> f64 {
        norm_sqr_weighted(&self.amplitudes, self.grid.dx()).sqrt()
    }

    /// Scale to unit norm and return the previous norm.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate(format!("cannot normalize a state of norm {n}")));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|z| *z *= inv);
        Ok(n)
    }

    /// `dx`-weighted inner product `<self, other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        let s: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(u, v)| u.conj() * v)
            .sum();
        s * self.grid.dx()
    }

    pub fn scale(&mut self, factor: Complex64) {
        if factor.im != 0.0 {
            self.real = false;
        }
        self.amplitudes.iter_mut().for_each(|z| *z *= factor);
    }

    fn transform(&mut self, fft: &Arc<dyn Fft<f64>>, ledger: &mut TransformLedger) {
        ledger.charge(self.real);
        fft.process(&mut self.amplitudes);
        let s = 1.0 / (self.grid.len() as f64).sqrt();
        self.amplitudes.iter_mut().for_each(|z| *z *= s);
    }
}

pub(crate) fn norm_sqr_weighted(values: &[Complex64], dx: f64) -> f64 {
    dx * values.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Coordinate to momentum space, in place.
pub fn forward_transform(w: &mut WaveFunction, ledger: &mut TransformLedger) -> Result<()> {
    if w.space != Space::Coordinate {
        return Err(Error::State("forward transform needs a coordinate-space state".into()));
    }
    let fft = w.grid.forward.clone();
    w.transform(&fft, ledger);
    w.space = Space::Momentum;
    Ok(())
}

/// Momentum to coordinate space, in place.
pub fn inverse_transform(w: &mut WaveFunction, ledger: &mut TransformLedger) -> Result<()> {
    if w.space != Space::Momentum {
        return Err(Error::State("inverse transform needs a momentum-space state".into()));
    }
    let fft = w.grid.inverse.clone();
    w.transform(&fft, ledger);
    w.space = Space::Coordinate;
    if w.real {
        // Roundoff leaves tiny imaginary parts on data that is real in exact arithmetic.
        w.amplitudes.iter_mut().for_each(|z| z.im = 0.0);
    }
    Ok(())
}

/// `dx`-weighted norm of a coordinate-space state.
pub fn norm(w: &WaveFunction) -> f64 {
    w.norm()
}
