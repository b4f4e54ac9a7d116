//! Dense diagonalization of the grid Hamiltonian, used as ground truth.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::potentials::Problem;

/// Dense symmetric `H = K + diag(V)` with the spectral kinetic matrix.
pub fn hamiltonian_matrix(problem: &Problem) -> DMatrix<f64> {
    let grid = problem.grid();
    let n = grid.len();
    let kappa = grid.wavenumbers();
    // K is circulant; its first row is the inverse DFT of kappa^2 / 2.
    let row: Vec<f64> = (0..n)
        .map(|d| {
            kappa
                .iter()
                .enumerate()
                .map(|(m, &k)| 0.5 * k * k * (2.0 * PI * (m * d) as f64 / n as f64).cos())
                .sum::<f64>()
                / n as f64
        })
        .collect();
    let v = problem.total_potential().values();
    DMatrix::from_fn(n, n, |j, l| {
        let d = if j >= l { j - l } else { n + j - l };
        row[d] + if j == l { v[j] } else { 0.0 }
    })
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub energy: f64,
    /// Unit `dx`-norm eigenvector with its largest-magnitude entry positive.
    pub state: WaveFunction,
}

/// Full eigendecomposition of the discrete Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpectralOracle {
    energies: Vec<f64>,
    /// Columns are Euclidean-orthonormal eigenvectors in ascending energy order.
    vectors: DMatrix<f64>,
    problem: Problem,
}

impl SpectralOracle {
    pub fn new(problem: &Problem) -> Self {
        let eig = SymmetricEigen::new(hamiltonian_matrix(problem));
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let n = order.len();
        let mut vectors = DMatrix::zeros(n, n);
        for (c, &i) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(i).into_owned();
            let pivot = col.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
            if pivot < 0.0 {
                col.neg_mut();
            }
            vectors.set_column(c, &col);
        }
        let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        Self { energies, vectors, problem: problem.clone() }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eigenpair(&self, k: usize) -> Eigenpair {
        let grid = self.problem.grid();
        let scale = 1.0 / grid.dx().sqrt();
        let values: Vec<f64> = self.vectors.column(k).iter().map(|x| x * scale).collect();
        Eigenpair {
            energy: self.energies[k],
            state: WaveFunction::from_real(grid.clone(), &values).expect("sizes match"),
        }
    }

    /// Exact `exp(-t H) u` for real `u`.
    pub fn propagate(&self, u: &WaveFunction, t: f64) -> WaveFunction {
        let x = DVector::from_vec(u.real_parts());
        let mut c = self.vectors.transpose() * x;
        let e0 = self.energies[0];
        // Shifting by E0 keeps the result representable for long times.
        for (ci, &e) in c.iter_mut().zip(&self.energies) {
            *ci *= (-(e - e0) * t).exp();
        }
        let y = &self.vectors * c * (-e0 * t).exp();
        WaveFunction::from_real(u.grid().clone(), y.as_slice()).expect("sizes match")
    }

    /// `exp(-t H) u` rescaled to unit norm.
    pub fn propagate_normalized(&self, u: &WaveFunction, t: f64) -> Result<WaveFunction> {
        let x = DVector::from_vec(u.real_parts());
        let mut c = self.vectors.transpose() * x;
        let e0 = self.energies[0];
        for (ci, &e) in c.iter_mut().zip(&self.energies) {
            *ci *= (-(e - e0) * t).exp();
        }
        let y = &self.vectors * c;
        let mut w = WaveFunction::from_real(u.grid().clone(), y.as_slice()).expect("sizes match");
        w.normalize()?;
        Ok(w)
    }
}

/// The `n_eigs` lowest eigenpairs of the grid Hamiltonian.
pub fn diagonalization_oracle(problem: &Problem, n_eigs: usize) -> Result<Vec<Eigenpair>> {
    let n = problem.grid().len();
    if n_eigs == 0 || n_eigs > n {
        return Err(Error::Config(format!("requested {n_eigs} eigenpairs of a {n}-point Hamiltonian")));
    }
    let oracle = SpectralOracle::new(problem);
    Ok((0..n_eigs).map(|k| oracle.eigenpair(k)).collect())
}
