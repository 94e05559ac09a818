use std::collections::BTreeMap;

use crate::fock::{apply_excitation, Determinant};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinExpectation {
    pub sz: f64,
    pub s_squared: f64,
}

impl SpinExpectation {
    /// `2S + 1` from `<S^2> = S(S + 1)`, rounded to the nearest integer.
    pub fn multiplicity(&self) -> u32 {
        (4.0 * self.s_squared + 1.0).max(0.0).sqrt().round() as u32
    }
}

/// `<S_z>` and `<S^2>` using `S^2 = S_z^2 + S_z + S_- S_+`, where
/// `<S_- S_+> = ||S_+ psi||^2`.
pub fn spin_expectations(psi: &StateVector) -> SpinExpectation {
    let basis = psi.basis();
    let n = basis.n_spatial();
    let sz = (basis.n_alpha() as f64 - basis.n_beta() as f64) / 2.0;
    let mut raised: BTreeMap<Determinant, f64> = BTreeMap::new();
    for (&det, &c) in basis.determinants().iter().zip(psi.coefficients()) {
        if c == 0.0 {
            continue;
        }
        for p in 0..n {
            if let Some((target, phase)) = apply_excitation(det, &[p], &[p + n]) {
                *raised.entry(target).or_default() += phase * c;
            }
        }
    }
    let lowered_raised: f64 = raised.values().map(|v| v * v).sum();
    let norm2: f64 = psi.coefficients().iter().map(|c| c * c).sum();
    SpinExpectation { sz, s_squared: (sz * sz + sz) * norm2 + lowered_raised }
}
