//! Residual of the contracted Schrödinger equation.

use crate::hamiltonian::HamiltonianOperator;
use crate::rdm::transition_2rdm;
use crate::state::StateVector;

/// `sum_{I,J} <psi|Gamma_IJ (H - E)|psi>^2` over canonical S_z-conserving
/// pairs, from a single residual vector.
pub fn cse_norm(psi: &StateVector, ham: &HamiltonianOperator) -> f64 {
    let (_, r) = ham.residual(psi);
    transition_2rdm(psi, &r).values().iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fci::diagonalize;
    use crate::fock::{apply_excitation, SectorBasis};
    use crate::test_support::{fixture_integrals, random_state};
    use nalgebra::DVector;
    use std::sync::Arc;

    fn h4() -> HamiltonianOperator {
        HamiltonianOperator::new(Arc::new(fixture_integrals("h4_linear_1.00.fcidump")), Arc::new(SectorBasis::new(4, 2, 2)))
    }

    #[test]
    fn zero_on_eigenvectors() {
        let ham = h4();
        let spec = diagonalize(&ham).unwrap();
        for v in spec.eigenvectors.iter().step_by(5) {
            assert!(cse_norm(v, &ham) < 1e-14);
        }
    }

    #[test]
    fn matches_dense_gamma_matrices() {
        let ham = h4();
        let basis = ham.basis().clone();
        let pairs = basis.pairs();
        let dense = ham.to_dense();
        for seed in 0..3 {
            let psi = random_state(&basis, seed);
            let v = DVector::from_column_slice(psi.coefficients());
            let e = v.dot(&(&dense * &v));
            let r = &dense * &v - &v * e;
            let mut expected = 0.0;
            for i in 0..pairs.len() {
                let (p, q) = pairs.pair(i);
                for j in 0..pairs.len() {
                    let (s, t) = pairs.pair(j);
                    let mut value = 0.0;
                    for (col, &det) in basis.determinants().iter().enumerate() {
                        // S_z-changing strings leave the sector and contribute nothing
                        let Some((d, ph)) = apply_excitation(det, &[p, q], &[t, s]) else { continue };
                        if let Some(row) = basis.index_of(d) {
                            value += v[row] * ph * r[col];
                        }
                    }
                    expected += value * value;
                }
            }
            let got = cse_norm(&psi, &ham);
            assert!((got - expected).abs() < 1e-12 * expected.max(1.0));
            assert!(got > 0.0);
        }
    }
}
