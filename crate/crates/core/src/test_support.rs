//! Shared helpers for unit tests.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fock::SectorBasis;
use crate::integrals::MolecularIntegrals;
use crate::state::StateVector;
use crate::two_body::TwoBodyCoefficients;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture_integrals(name: &str) -> MolecularIntegrals {
    MolecularIntegrals::from_fcidump_file(fixture_path(name)).expect("fixture parses")
}

pub fn fixture_sidecar(name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.json"))).expect("sidecar exists");
    serde_json::from_str(&text).expect("sidecar is JSON")
}

pub fn random_state(basis: &std::sync::Arc<SectorBasis>, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    StateVector::new(basis.clone(), coeffs).normalized()
}

/// Random S_z-conserving two-body operator with roughly `density` of the
/// allowed entries populated.
pub fn random_two_body(n_spatial: usize, seed: u64, density: f64) -> TwoBodyCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut op = TwoBodyCoefficients::zeros(n_spatial);
    let pairs = op.pair_index();
    for i in 0..op.n_pairs() {
        for j in 0..op.n_pairs() {
            if pairs.spin(i) == pairs.spin(j) && rng.gen_bool(density) {
                op.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
    }
    op
}

pub fn random_anti_hermitian(n_spatial: usize, seed: u64, density: f64) -> TwoBodyCoefficients {
    random_two_body(n_spatial, seed, density).anti_hermitian_part()
}
