//! Exact diagonalization of a sector Hamiltonian.

use nalgebra::SymmetricEigen;

use crate::error::{CqeError, Result};
use crate::hamiltonian::HamiltonianOperator;
use crate::state::{dot, StateVector};

/// Largest sector the dense path accepts.
pub const MAX_DENSE_DIM: usize = 10_000;

/// Eigenvalues closer than this are treated as one degenerate level when
/// identifying states.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
}

/// Full eigendecomposition of the dense sector matrix, ascending.
pub fn diagonalize(ham: &HamiltonianOperator) -> Result<SpectrumResult> {
    let dim = ham.dim();
    if dim > MAX_DENSE_DIM {
        return Err(CqeError::DimensionTooLarge { dim, cap: MAX_DENSE_DIM });
    }
    let eig = SymmetricEigen::new(ham.to_dense());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let basis = ham.basis();
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            // deterministic sign: largest-magnitude component positive
            let lead = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            StateVector::new(basis.clone(), v).normalized()
        })
        .collect();
    Ok(SpectrumResult { eigenvalues, eigenvectors })
}

/// `|<v_k|psi>|^2` for every eigenvector.
pub fn eigenstate_overlap(psi: &StateVector, spectrum: &SpectrumResult) -> Vec<f64> {
    spectrum
        .eigenvectors
        .iter()
        .map(|v| {
            let o = psi.dot(v);
            o * o
        })
        .collect()
}

/// The eigenstate a state is closest to, with overlaps summed over
/// degenerate levels so that arbitrary rotations inside a multiplet do not
/// split the weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateIdentification {
    /// Index of the lowest eigenvalue of the dominant level.
    pub index: usize,
    pub eigenvalue: f64,
    /// Summed squared overlap with that level.
    pub overlap: f64,
    pub degeneracy: usize,
}

pub fn identify_state(psi: &StateVector, spectrum: &SpectrumResult) -> StateIdentification {
    let overlaps = eigenstate_overlap(psi, spectrum);
    let values = &spectrum.eigenvalues;
    let mut best = StateIdentification { index: 0, eigenvalue: values[0], overlap: -1.0, degeneracy: 0 };
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] < DEGENERACY_TOL {
            end += 1;
        }
        let weight: f64 = overlaps[start..end].iter().sum();
        if weight > best.overlap {
            best = StateIdentification { index: start, eigenvalue: values[start], overlap: weight, degeneracy: end - start };
        }
        start = end;
    }
    best
}

impl SpectrumResult {
    /// Residual `||H v - lambda v||` of one eigenpair.
    pub fn residual(&self, ham: &HamiltonianOperator, k: usize) -> f64 {
        let v = &self.eigenvectors[k];
        let mut hv = ham.apply(v);
        for (h, c) in hv.iter_mut().zip(v.coefficients()) {
            *h -= self.eigenvalues[k] * c;
        }
        dot(&hv, &hv).sqrt()
    }
}
