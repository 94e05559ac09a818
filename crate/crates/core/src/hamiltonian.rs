//! Sector Hamiltonian assembled once by Slater–Condon rules and applied as a
//! sparse matrix.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::fock::{apply_excitation, Determinant, SectorBasis};
use crate::integrals::MolecularIntegrals;
use crate::sparse::SparseMatrix;
use crate::state::{dot, StateVector};

/// `<bra|H|ket>` for two determinants, including the core energy on the
/// diagonal.
pub fn slater_condon(ints: &MolecularIntegrals, bra: Determinant, ket: Determinant) -> f64 {
    let diff = bra.0 ^ ket.0;
    match diff.count_ones() {
        0 => {
            let occ: Vec<usize> = ket.occupied().collect();
            let mut value = ints.core_energy();
            for (a, &i) in occ.iter().enumerate() {
                value += ints.spin_orbital_h(i, i);
                for &j in &occ[a + 1..] {
                    value += ints.antisymmetrized(i, j, i, j);
                }
            }
            value
        }
        2 => {
            let from = (ket.0 & !bra.0).trailing_zeros() as usize;
            let to = (bra.0 & !ket.0).trailing_zeros() as usize;
            let (_, phase) = apply_excitation(ket, &[to], &[from]).expect("single excitation");
            let mut value = ints.spin_orbital_h(to, from);
            for k in ket.occupied().filter(|&k| k != from) {
                value += ints.antisymmetrized(to, k, from, k);
            }
            phase * value
        }
        4 => {
            let removed = Determinant(ket.0 & !bra.0);
            let added = Determinant(bra.0 & !ket.0);
            let mut r = removed.occupied();
            let (a1, a2) = (r.next().unwrap(), r.next().unwrap());
            let mut c = added.occupied();
            let (b1, b2) = (c.next().unwrap(), c.next().unwrap());
            let (_, phase) = apply_excitation(ket, &[b1, b2], &[a2, a1]).expect("double excitation");
            phase * ints.antisymmetrized(b1, b2, a1, a2)
        }
        _ => 0.0,
    }
}

/// Real-symmetric Hamiltonian restricted to one `(N_alpha, N_beta)` sector.
#[derive(Debug, Clone)]
pub struct HamiltonianOperator {
    integrals: Arc<MolecularIntegrals>,
    basis: Arc<SectorBasis>,
    matrix: SparseMatrix,
}

impl HamiltonianOperator {
    pub fn new(integrals: Arc<MolecularIntegrals>, basis: Arc<SectorBasis>) -> Self {
        assert_eq!(
            integrals.n_spatial(),
            basis.n_spatial(),
            "integrals and basis disagree on the orbital count"
        );
        let dets = basis.determinants();
        let n = basis.n_spatial();
        let n_spin = basis.n_spin_orbitals();
        let same_spin = |p: usize, q: usize| (p < n) == (q < n);
        let mut triplets = Vec::new();
        for (j, &ket) in dets.iter().enumerate() {
            triplets.push((j, j, slater_condon(&integrals, ket, ket)));
            let occ: Vec<usize> = ket.occupied().collect();
            let virt: Vec<usize> = (0..n_spin).filter(|&p| !ket.is_occupied(p)).collect();
            let mut push = |bra: Determinant| {
                let value = slater_condon(&integrals, bra, ket);
                if value != 0.0 {
                    let i = basis.index_of(bra).expect("excitation stays in the sector");
                    triplets.push((i, j, value));
                }
            };
            for &a in &occ {
                for &b in virt.iter().filter(|&&b| same_spin(a, b)) {
                    push(Determinant(ket.0 ^ (1 << a) ^ (1 << b)));
                }
            }
            for (x, &a1) in occ.iter().enumerate() {
                for &a2 in &occ[x + 1..] {
                    let removed_alpha = (a1 < n) as usize + (a2 < n) as usize;
                    for (y, &b1) in virt.iter().enumerate() {
                        for &b2 in &virt[y + 1..] {
                            if (b1 < n) as usize + (b2 < n) as usize != removed_alpha {
                                continue;
                            }
                            push(Determinant(ket.0 ^ (1 << a1) ^ (1 << a2) ^ (1 << b1) ^ (1 << b2)));
                        }
                    }
                }
            }
        }
        let matrix = SparseMatrix::from_triplets(dets.len(), triplets);
        Self { integrals, basis, matrix }
    }

    pub fn integrals(&self) -> &Arc<MolecularIntegrals> {
        &self.integrals
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.matrix.to_dense()
    }

    /// `H|psi>`, unnormalized.
    pub fn apply(&self, psi: &StateVector) -> Vec<f64> {
        psi.assert_same_sector(&self.basis);
        self.matrix.matvec(psi.coefficients())
    }

    pub fn apply_raw(&self, coefficients: &[f64]) -> Vec<f64> {
        self.matrix.matvec(coefficients)
    }

    /// `<psi|H|psi>` for a normalized state.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        dot(psi.coefficients(), &self.apply(psi))
    }

    /// Energy and residual `(H - E)|psi>`.
    pub fn residual(&self, psi: &StateVector) -> (f64, Vec<f64>) {
        let mut hpsi = self.apply(psi);
        let energy = dot(psi.coefficients(), &hpsi);
        for (r, c) in hpsi.iter_mut().zip(psi.coefficients()) {
            *r -= energy * c;
        }
        (energy, hpsi)
    }

    /// `<psi|(H - E)^2|psi>` evaluated as the squared norm of the residual.
    pub fn variance(&self, psi: &StateVector) -> f64 {
        let (_, r) = self.residual(psi);
        dot(&r, &r)
    }
}
