//! Two-particle reduced density (and transition) matrices over canonical
//! spin-orbital pairs.

use crate::fock::PairIndex;
use crate::integrals::MolecularIntegrals;
use crate::state::StateVector;

/// `D_IJ = <bra| a†_p a†_q a_t a_s |ket>` for canonical `I = (p, q)`,
/// `J = (s, t)`. With `bra == ket` this is the 2-RDM; otherwise a transition
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRDM {
    n_spatial: usize,
    n_pairs: usize,
    values: Vec<f64>,
}

impl TwoRDM {
    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    #[inline]
    pub fn get(&self, bra: usize, ket: usize) -> f64 {
        self.values[bra * self.n_pairs + ket]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn from_values(n_spatial: usize, values: Vec<f64>) -> Self {
        let n_pairs = PairIndex::new(n_spatial).len();
        assert_eq!(values.len(), n_pairs * n_pairs, "pair matrix has the wrong size");
        Self { n_spatial, n_pairs, values }
    }

    /// `2D^{pq}_{st}` for arbitrary spin-orbital indices.
    pub fn element(&self, p: usize, q: usize, s: usize, t: usize) -> f64 {
        if p == q || s == t {
            return 0.0;
        }
        let pairs = PairIndex::new(self.n_spatial);
        let (bra, sb) = if p < q { (pairs.index(p, q), 1.0) } else { (pairs.index(q, p), -1.0) };
        let (ket, sk) = if s < t { (pairs.index(s, t), 1.0) } else { (pairs.index(t, s), -1.0) };
        sb * sk * self.get(bra, ket)
    }

    /// `sum_{pq} 2D^{pq}_{pq}` over all ordered pairs.
    pub fn trace(&self) -> f64 {
        2.0 * (0..self.n_pairs).map(|i| self.get(i, i)).sum::<f64>()
    }

    /// 1-RDM `1D^p_s = <a†_p a_s>` by partial trace, given the electron count.
    pub fn contract_to_one_rdm(&self, n_electrons: usize) -> Vec<f64> {
        let m = 2 * self.n_spatial;
        let mut out = vec![0.0; m * m];
        if n_electrons < 2 {
            return out;
        }
        for p in 0..m {
            for s in 0..m {
                out[p * m + s] = (0..m).map(|q| self.element(p, q, s, q)).sum::<f64>() / (n_electrons - 1) as f64;
            }
        }
        out
    }

    /// `E_core + sum h_ps 1D^p_s + sum_{I,J} <pq||st> D_IJ`.
    pub fn energy(&self, ints: &MolecularIntegrals, n_electrons: usize) -> f64 {
        let m = 2 * self.n_spatial;
        let one = self.contract_to_one_rdm(n_electrons);
        let pairs = PairIndex::new(self.n_spatial);
        let mut energy = ints.core_energy();
        for p in 0..m {
            for s in 0..m {
                energy += ints.spin_orbital_h(p, s) * one[p * m + s];
            }
        }
        for (bra, &(p, q)) in pairs.pairs().iter().enumerate() {
            for (ket, &(s, t)) in pairs.pairs().iter().enumerate() {
                let d = self.get(bra, ket);
                if d != 0.0 {
                    energy += ints.antisymmetrized(p, q, s, t) * d;
                }
            }
        }
        energy
    }
}

/// `<bra|Gamma_IJ|ket>` for every S_z-conserving canonical `(I, J)`.
pub fn transition_2rdm(bra: &StateVector, ket: &[f64]) -> TwoRDM {
    let basis = bra.basis();
    assert_eq!(ket.len(), basis.len(), "ket length does not match the basis");
    let n_pairs = basis.pairs().len();
    let mut values = vec![0.0; n_pairs * n_pairs];
    let b = bra.coefficients();
    for link in basis.two_body_links() {
        values[link.bra_pair * n_pairs + link.ket_pair] += link.phase * b[link.to] * ket[link.from];
    }
    TwoRDM { n_spatial: basis.n_spatial(), n_pairs, values }
}

/// The 2-RDM of a normalized state.
pub fn compute_2rdm(psi: &StateVector) -> TwoRDM {
    transition_2rdm(psi, psi.coefficients())
}
