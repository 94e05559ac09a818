use std::sync::Arc;

use crate::fock::{Determinant, SectorBasis};

/// Real amplitudes over the determinants of one sector.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<SectorBasis>,
    coefficients: Vec<f64>,
}

impl StateVector {
    pub fn new(basis: Arc<SectorBasis>, coefficients: Vec<f64>) -> Self {
        assert_eq!(coefficients.len(), basis.len(), "coefficient count does not match the basis");
        Self { basis, coefficients }
    }

    pub fn zeros(basis: Arc<SectorBasis>) -> Self {
        let n = basis.len();
        Self::new(basis, vec![0.0; n])
    }

    pub fn from_determinant(basis: Arc<SectorBasis>, det: Determinant) -> Option<Self> {
        let idx = basis.index_of(det)?;
        let mut state = Self::zeros(basis);
        state.coefficients[idx] = 1.0;
        Some(state)
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coefficients)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.coefficients.iter_mut().for_each(|c| *c /= n);
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn dot(&self, other: &StateVector) -> f64 {
        self.assert_same_sector(other.basis());
        dot(&self.coefficients, &other.coefficients)
    }

    /// Replaces the amplitudes, keeping the basis.
    pub fn with_coefficients(&self, coefficients: Vec<f64>) -> Self {
        Self::new(self.basis.clone(), coefficients)
    }

    pub(crate) fn assert_same_sector(&self, basis: &SectorBasis) {
        assert!(self.basis.same_sector(basis), "state and operator live in different sectors");
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
