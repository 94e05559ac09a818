use crate::hamiltonian::HamiltonianOperator;
use crate::rdm::{compute_2rdm, transition_2rdm, TwoRDM};
use crate::state::{dot, StateVector};
use crate::two_body::TwoBodyCoefficients;

/// Energy, variance and variance gradient at one state.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub energy: f64,
    pub variance: f64,
    pub gradient: TwoBodyCoefficients,
}

/// Packs the raw gradient `G_IJ = 2 (K_IJ - D_IJ Var)` into the gradient
/// over independent anti-Hermitian parameters.
///
/// `K_IJ` approximates `<psi|Gamma_IJ (H - E)^2|psi>`. The variance along
/// `exp(t A)` changes at rate `sum_IJ A_IJ G_JI`, so for `A_JI = -A_IJ` the
/// gradient is `(G_JI - G_IJ) / 2`, which makes `<A, grad>` the directional
/// derivative.
pub fn assemble_gradient(kernel: &TwoRDM, rdm: &TwoRDM, variance: f64) -> TwoBodyCoefficients {
    let n = kernel.n_pairs();
    assert_eq!(n, rdm.n_pairs(), "kernel and 2-RDM disagree on the pair count");
    let raw = |i: usize, j: usize| 2.0 * (kernel.get(i, j) - rdm.get(i, j) * variance);
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] = 0.5 * (raw(j, i) - raw(i, j));
        }
    }
    TwoBodyCoefficients::from_pair_matrix(kernel.n_spatial(), values)
}

/// Exact evaluation: `w = (H - E)^2 psi` from two Hamiltonian applications,
/// kernel `<psi|Gamma|w>`.
pub fn evaluate_exact(psi: &StateVector, ham: &HamiltonianOperator) -> Evaluation {
    let (energy, r) = ham.residual(psi);
    let mut w = ham.apply_raw(&r);
    for (w, r) in w.iter_mut().zip(&r) {
        *w -= energy * r;
    }
    let variance = dot(&r, &r);
    let kernel = transition_2rdm(psi, &w);
    let gradient = assemble_gradient(&kernel, &compute_2rdm(psi), variance);
    Evaluation { energy, variance, gradient }
}

pub fn variance_gradient(psi: &StateVector, ham: &HamiltonianOperator) -> TwoBodyCoefficients {
    evaluate_exact(psi, ham).gradient
}
