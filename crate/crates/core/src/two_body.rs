//! Two-body operators `F = sum_{I,J} A_IJ a†_p a†_q a_t a_s` with canonical
//! pairs `I = (p < q)`, `J = (s < t)`, and the action of `exp(F)` on states.
//!
//! Only S_z-conserving blocks (alpha-alpha, alpha-beta, beta-beta on both
//! sides) may be populated.

use std::sync::Arc;

use crate::error::{CqeError, Result};
use crate::fock::{PairIndex, SectorBasis};
use crate::sparse::SparseMatrix;
use crate::state::{norm, StateVector};

/// Relative size of the last Taylor term at which the series is cut.
pub const TAYLOR_TOLERANCE: f64 = 1e-15;
pub const TAYLOR_MAX_TERMS: usize = 200;

/// Coefficients of a two-body operator over canonical pair indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyCoefficients {
    n_spatial: usize,
    n_pairs: usize,
    values: Vec<f64>,
}

impl TwoBodyCoefficients {
    pub fn zeros(n_spatial: usize) -> Self {
        let n_spin = 2 * n_spatial;
        let n_pairs = n_spin * (n_spin - 1) / 2;
        Self { n_spatial, n_pairs, values: vec![0.0; n_pairs * n_pairs] }
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn pair_index(&self) -> PairIndex {
        PairIndex::new(self.n_spatial)
    }

    #[inline]
    pub fn get(&self, bra: usize, ket: usize) -> f64 {
        self.values[bra * self.n_pairs + ket]
    }

    /// Sets `A_IJ`. Panics for a coefficient that would change S_z.
    pub fn set(&mut self, bra: usize, ket: usize, value: f64) {
        if value != 0.0 {
            let pairs = self.pair_index();
            assert!(
                pairs.spin(bra) == pairs.spin(ket),
                "two-body coefficient ({bra}, {ket}) does not conserve S_z"
            );
        }
        self.values[bra * self.n_pairs + ket] = value;
    }

    /// Coefficient of `a†_p a†_q a_t a_s` for arbitrary spin-orbital indices,
    /// with the antisymmetry signs implied by canonical storage.
    pub fn element(&self, p: usize, q: usize, s: usize, t: usize) -> f64 {
        if p == q || s == t {
            return 0.0;
        }
        let pairs = self.pair_index();
        let (bra, sb) = if p < q { (pairs.index(p, q), 1.0) } else { (pairs.index(q, p), -1.0) };
        let (ket, sk) = if s < t { (pairs.index(s, t), 1.0) } else { (pairs.index(t, s), -1.0) };
        sb * sk * self.get(bra, ket)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Frobenius inner product over the full pair matrix.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.n_pairs, other.n_pairs, "operators act on different orbital spaces");
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &Self) {
        assert_eq!(self.n_pairs, other.n_pairs, "operators act on different orbital spaces");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += factor * b;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        let n = self.n_pairs;
        (0..n).all(|i| (0..=i).all(|j| (self.get(i, j) + self.get(j, i)).abs() <= tol))
    }

    /// `(A - A^T) / 2`.
    pub fn anti_hermitian_part(&self) -> Self {
        let n = self.n_pairs;
        let mut out = Self::zeros(self.n_spatial);
        for i in 0..n {
            for j in 0..n {
                out.values[i * n + j] = 0.5 * (self.get(i, j) - self.get(j, i));
            }
        }
        out
    }

    /// Builds from a raw pair matrix, zeroing S_z-changing blocks.
    pub(crate) fn from_pair_matrix(n_spatial: usize, mut values: Vec<f64>) -> Self {
        let mut out = Self::zeros(n_spatial);
        assert_eq!(values.len(), out.values.len(), "pair matrix has the wrong size");
        let pairs = out.pair_index();
        let n = out.n_pairs;
        for i in 0..n {
            for j in 0..n {
                if pairs.spin(i) != pairs.spin(j) {
                    values[i * n + j] = 0.0;
                }
            }
        }
        out.values = values;
        out
    }

    fn check_sector(&self, basis: &SectorBasis) {
        assert_eq!(self.n_spatial, basis.n_spatial(), "operator and basis disagree on the orbital count");
    }
}

/// `F|psi>` summed over all stored coefficients.
pub fn apply_two_body(op: &TwoBodyCoefficients, psi: &StateVector) -> Vec<f64> {
    let basis = psi.basis();
    op.check_sector(basis);
    let coeffs = psi.coefficients();
    let mut out = vec![0.0; coeffs.len()];
    for link in basis.two_body_links() {
        let a = op.get(link.bra_pair, link.ket_pair);
        if a != 0.0 {
            out[link.to] += a * link.phase * coeffs[link.from];
        }
    }
    out
}

/// Matrix of a two-body operator in one sector's determinant basis, built
/// once so repeated exponentials along the same direction stay cheap.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    basis: Arc<SectorBasis>,
    matrix: SparseMatrix,
    norm_one: f64,
}

impl GeneratorMatrix {
    pub fn new(op: &TwoBodyCoefficients, basis: Arc<SectorBasis>) -> Self {
        op.check_sector(&basis);
        let triplets = basis
            .two_body_links()
            .iter()
            .filter_map(|link| {
                let a = op.get(link.bra_pair, link.ket_pair);
                (a != 0.0).then_some((link.to, link.from, a * link.phase))
            })
            .collect();
        let matrix = SparseMatrix::from_triplets(basis.len(), triplets);
        let norm_one = matrix.norm_one();
        Self { basis, matrix, norm_one }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// `exp(scale * F)|psi>` by Taylor series.
    ///
    /// The step is split into equal substeps whenever `|scale| * ||F||_1`
    /// exceeds 2, so every series starts from a contraction-sized generator.
    /// The result is renormalized.
    pub fn exp_apply(&self, scale: f64, psi: &StateVector) -> Result<StateVector> {
        psi.assert_same_sector(&self.basis);
        if !scale.is_finite() {
            return Err(CqeError::InvalidConfig(format!("non-finite exponential scale {scale}")));
        }
        if scale == 0.0 || self.matrix.nnz() == 0 {
            return Ok(psi.clone());
        }
        let substeps = ((scale.abs() * self.norm_one) / 2.0).ceil().max(1.0) as usize;
        let h = scale / substeps as f64;
        let mut v = psi.coefficients().to_vec();
        for _ in 0..substeps {
            v = taylor_step(|x| self.matrix.matvec(x), h, &v)?;
        }
        let mut out = psi.with_coefficients(v);
        out.normalize();
        Ok(out)
    }
}

/// One series `sum_k (h M)^k v / k!`, cut when the newest term drops below
/// `TAYLOR_TOLERANCE` relative to the partial sum.
pub(crate) fn taylor_step(apply: impl Fn(&[f64]) -> Vec<f64>, h: f64, v: &[f64]) -> Result<Vec<f64>> {
    let mut result = v.to_vec();
    let mut term = v.to_vec();
    for k in 1..=TAYLOR_MAX_TERMS {
        term = apply(&term);
        let factor = h / k as f64;
        term.iter_mut().for_each(|t| *t *= factor);
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
        let term_norm = norm(&term);
        if !term_norm.is_finite() {
            break;
        }
        if term_norm <= TAYLOR_TOLERANCE * norm(&result) {
            return Ok(result);
        }
    }
    Err(CqeError::SeriesDiverged { terms: TAYLOR_MAX_TERMS })
}

/// `exp(scale * A)|psi>` for an anti-Hermitian two-body operator.
pub fn exp_apply(op: &TwoBodyCoefficients, scale: f64, psi: &StateVector) -> Result<StateVector> {
    debug_assert!(op.is_anti_hermitian(1e-12), "exp_apply expects an anti-Hermitian generator");
    GeneratorMatrix::new(op, psi.basis().clone()).exp_apply(scale, psi)
}
