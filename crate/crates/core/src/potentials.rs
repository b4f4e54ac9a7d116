//! Benchmark potentials and the two ways of splitting the Hamiltonian.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Real potential sampled on a grid, with its analytic derivative.
///
/// `grad_sq` is `(dV/dx)^2`, the diagonal form of `[V, [T, V]]` for
/// `T = -1/2 d^2/dx^2`.
#[derive(Debug, Clone)]
pub struct Potential {
    values: Vec<f64>,
    gradient: Option<Vec<f64>>,
    grad_sq: Option<Vec<f64>>,
    origin_shift: f64,
}

impl Potential {
    pub fn new(values: Vec<f64>, gradient: Option<Vec<f64>>, origin_shift: f64) -> Result<Self> {
        if let Some(g) = &gradient {
            if g.len() != values.len() {
                return Err(Error::Config("gradient length differs from potential length".into()));
            }
        }
        let grad_sq = gradient.as_ref().map(|g| g.iter().map(|d| d * d).collect());
        Ok(Self { values, gradient, grad_sq, origin_shift })
    }

    pub fn zero(grid: &Grid) -> Self {
        let n = grid.len();
        Self::new(vec![0.0; n], Some(vec![0.0; n]), 0.0).expect("lengths agree")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gradient(&self) -> Option<&[f64]> {
        self.gradient.as_deref()
    }

    pub fn grad_sq(&self) -> Option<&[f64]> {
        self.grad_sq.as_deref()
    }

    /// Constant added to the textbook form so that the spectrum is nonnegative.
    pub fn origin_shift(&self) -> f64 {
        self.origin_shift
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise sum; gradients are summed before squaring.
    pub fn sum(&self, other: &Potential) -> Result<Potential> {
        if self.len() != other.len() {
            return Err(Error::Config("potentials live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        let gradient = match (&self.gradient, &other.gradient) {
            (Some(g), Some(h)) => Some(g.iter().zip(h).map(|(a, b)| a + b).collect()),
            _ => None,
        };
        Potential::new(values, gradient, self.origin_shift + other.origin_shift)
    }
}

/// `V(x) = -(L/2) (sech^2 x - 1)` with `L = lambda (lambda + 1)`.
pub fn poschl_teller(grid: &Grid, lambda_product: f64) -> Result<Potential> {
    if !(lambda_product > 0.0) || !lambda_product.is_finite() {
        return Err(Error::Domain(format!(
            "lambda(lambda+1) must be positive, got {lambda_product}"
        )));
    }
    let (values, gradient) = grid
        .nodes()
        .iter()
        .map(|&x| {
            let sech = 1.0 / x.cosh();
            let sech2 = sech * sech;
            let v = -0.5 * lambda_product * (sech2 - 1.0);
            (v, lambda_product * sech2 * x.tanh())
        })
        .unzip();
    Potential::new(values, Some(gradient), 0.5 * lambda_product)
}

/// `V(x) = omega^2 x^2 / 2`.
pub fn harmonic(grid: &Grid, omega: f64) -> Result<Potential> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    let w2 = omega * omega;
    let (values, gradient) = grid.nodes().iter().map(|&x| (0.5 * w2 * x * x, w2 * x)).unzip();
    Potential::new(values, Some(gradient), 0.0)
}

/// How the Hamiltonian is divided into the `A` and `B` parts of a splitting.
#[derive(Debug, Clone)]
pub enum Split {
    /// `A = T`, `B = V`.
    Full,
    /// `A = T + omega^2 x^2 / 2` (propagated exactly), `B` is the perturbation.
    NearIntegrable { omega: f64, quadratic: Potential },
}

/// A discretized Schrödinger operator together with its splitting.
#[derive(Debug, Clone)]
pub struct Problem {
    grid: Arc<Grid>,
    split: Split,
    /// The `B` part.
    potential: Potential,
    /// Full potential of `H`, i.e. `B` plus the quadratic part when near-integrable.
    total: Potential,
}

impl Problem {
    pub fn full(grid: Arc<Grid>, potential: Potential) -> Result<Self> {
        check_len(&grid, &potential)?;
        Ok(Self { grid, split: Split::Full, total: potential.clone(), potential })
    }

    pub fn near_integrable(grid: Arc<Grid>, omega: f64, perturbation: Potential) -> Result<Self> {
        check_len(&grid, &perturbation)?;
        let quadratic = harmonic(&grid, omega)?;
        let total = quadratic.sum(&perturbation)?;
        Ok(Self { grid, split: Split::NearIntegrable { omega, quadratic }, potential: perturbation, total })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn split(&self) -> &Split {
        &self.split
    }

    /// Potential of the `B` exponentials.
    pub fn b_potential(&self) -> &Potential {
        &self.potential
    }

    /// Potential part of the full Hamiltonian.
    pub fn total_potential(&self) -> &Potential {
        &self.total
    }

    pub fn is_near_integrable(&self) -> bool {
        matches!(self.split, Split::NearIntegrable { .. })
    }
}

fn check_len(grid: &Grid, p: &Potential) -> Result<()> {
    if p.len() != grid.len() {
        return Err(Error::Config(format!(
            "potential has {} samples but the grid has {} nodes",
            p.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// Harmonic oscillator perturbed by a Pöschl–Teller well; `lambda_product = 0` gives the pure oscillator.
pub fn perturbed_ho_problem(grid: Arc<Grid>, omega: f64, lambda_product: f64) -> Result<Problem> {
    let perturbation = if lambda_product == 0.0 {
        Potential::zero(&grid)
    } else {
        poschl_teller(&grid, lambda_product)?
    };
    Problem::near_integrable(grid, omega, perturbation)
}

/// Pöschl–Teller well with the full `T + V` split.
pub fn poschl_teller_problem(grid: Arc<Grid>, lambda_product: f64) -> Result<Problem> {
    let v = poschl_teller(&grid, lambda_product)?;
    Problem::full(grid, v)
}
