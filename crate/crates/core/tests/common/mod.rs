#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqe::fock::PairIndex;
use cqe::{apply_excitation, HamiltonianOperator, MolecularIntegrals, SectorBasis, StateVector, TwoBodyCoefficients};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn hamiltonian(name: &str, n_alpha: usize, n_beta: usize) -> HamiltonianOperator {
    let ints = Arc::new(MolecularIntegrals::from_fcidump_file(fixture(name)).expect("fixture parses"));
    let n = ints.n_spatial();
    HamiltonianOperator::new(ints, Arc::new(SectorBasis::new(n, n_alpha, n_beta)))
}

pub fn random_state(basis: &Arc<SectorBasis>, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    StateVector::new(basis.clone(), coeffs).normalized()
}

pub fn random_anti_hermitian(n_spatial: usize, seed: u64) -> TwoBodyCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut op = TwoBodyCoefficients::zeros(n_spatial);
    let pairs = op.pair_index();
    for i in 0..op.n_pairs() {
        for j in 0..op.n_pairs() {
            if pairs.spin(i) == pairs.spin(j) {
                op.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
    }
    op.anti_hermitian_part()
}

/// Dense matrix of `sum_IJ A_IJ a†_p a†_q a_t a_s` built string by string.
pub fn dense_two_body(op: &TwoBodyCoefficients, basis: &SectorBasis) -> DMatrix<f64> {
    let pairs = PairIndex::new(basis.n_spatial());
    let dim = basis.len();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..pairs.len() {
        for j in 0..pairs.len() {
            let a = op.get(i, j);
            if a == 0.0 {
                continue;
            }
            let (p, q) = pairs.pair(i);
            let (s, t) = pairs.pair(j);
            for (col, &det) in basis.determinants().iter().enumerate() {
                if let Some((d, ph)) = apply_excitation(det, &[p, q], &[t, s]) {
                    if let Some(row) = basis.index_of(d) {
                        m[(row, col)] += a * ph;
                    }
                }
            }
        }
    }
    m
}

/// `exp(K)` for real antisymmetric `K` through the eigendecomposition of
/// `-K^2`: `cos(S) + K sinc(S)`.
pub fn dense_exponential(k: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = k.nrows();
    let eig = nalgebra::SymmetricEigen::new(-(k * k));
    let mut cos_part = DMatrix::zeros(dim, dim);
    let mut sinc_part = DMatrix::zeros(dim, dim);
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        let w = lam.max(0.0).sqrt();
        let v = eig.eigenvectors.column(i);
        let proj = v * v.transpose();
        cos_part += &proj * w.cos();
        sinc_part += proj * if w < 1e-12 { 1.0 } else { w.sin() / w };
    }
    cos_part + k * sinc_part
}

pub fn to_dvector(psi: &StateVector) -> DVector<f64> {
    DVector::from_column_slice(psi.coefficients())
}
