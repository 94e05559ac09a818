//! Determinant bases for a fixed `(N_alpha, N_beta)` sector and sign-correct
//! application of fermionic operator strings.
//!
//! Phase convention: acting with `a_p` or `a†_p` on an occupation contributes
//! `(-1)^k`, where `k` counts occupied spin orbitals with index below `p` in
//! the occupation the operator acts on. Basis determinants are therefore
//! `a†_{p1} a†_{p2} ... |vac>` with `p1 < p2 < ...`.

use std::collections::HashMap;
use std::sync::OnceLock;

/// Occupation bitmask over at most 64 spin orbitals (block layout: alpha
/// orbitals first, then beta).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Determinant(pub u64);

impl Determinant {
    pub fn from_occupations(n_spatial: usize, alpha: &[usize], beta: &[usize]) -> Self {
        let mut bits = 0u64;
        for &p in alpha {
            assert!(p < n_spatial, "alpha orbital {p} out of range");
            bits |= 1 << p;
        }
        for &p in beta {
            assert!(p < n_spatial, "beta orbital {p} out of range");
            bits |= 1 << (p + n_spatial);
        }
        Determinant(bits)
    }

    #[inline]
    pub fn is_occupied(self, p: usize) -> bool {
        self.0 >> p & 1 == 1
    }

    /// Number of occupied spin orbitals with index below `p`.
    #[inline]
    pub fn count_below(self, p: usize) -> u32 {
        (self.0 & ((1u64 << p) - 1)).count_ones()
    }

    pub fn n_alpha(self, n_spatial: usize) -> usize {
        (self.0 & ((1u64 << n_spatial) - 1)).count_ones() as usize
    }

    pub fn n_beta(self, n_spatial: usize) -> usize {
        (self.0 >> n_spatial).count_ones() as usize
    }

    /// Occupied spin orbitals in ascending order.
    pub fn occupied(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let p = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(p)
        })
    }

    /// Swaps alpha and beta occupations.
    pub fn spin_flipped(self, n_spatial: usize) -> Self {
        let mask = (1u64 << n_spatial) - 1;
        Determinant(((self.0 & mask) << n_spatial) | (self.0 >> n_spatial))
    }

    #[inline]
    fn annihilate(self, p: usize) -> Option<(Self, bool)> {
        if !self.is_occupied(p) {
            return None;
        }
        Some((Determinant(self.0 & !(1 << p)), self.count_below(p) % 2 == 1))
    }

    #[inline]
    fn create(self, p: usize) -> Option<(Self, bool)> {
        if self.is_occupied(p) {
            return None;
        }
        Some((Determinant(self.0 | (1 << p)), self.count_below(p) % 2 == 1))
    }
}

/// Applies `a†_{c0} a†_{c1} ... a_{a0} a_{a1} ...` to `det`, rightmost
/// operator first. Returns the resulting determinant and phase, or `None`
/// when the string annihilates the state.
pub fn apply_excitation(det: Determinant, create: &[usize], annihilate: &[usize]) -> Option<(Determinant, f64)> {
    let mut current = det;
    let mut odd = false;
    for &p in annihilate.iter().rev() {
        let (next, flip) = current.annihilate(p)?;
        current = next;
        odd ^= flip;
    }
    for &p in create.iter().rev() {
        let (next, flip) = current.create(p)?;
        current = next;
        odd ^= flip;
    }
    Some((current, if odd { -1.0 } else { 1.0 }))
}

/// Spin type of a spin-orbital pair: both alpha, mixed, or both beta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairSpin {
    AlphaAlpha,
    AlphaBeta,
    BetaBeta,
}

/// Canonical pairs `(p, q)` with `p < q` over `n_spin` spin orbitals.
#[derive(Debug, Clone)]
pub struct PairIndex {
    n_spatial: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairIndex {
    pub fn new(n_spatial: usize) -> Self {
        let n_spin = 2 * n_spatial;
        let pairs = (0..n_spin).flat_map(|p| (p + 1..n_spin).map(move |q| (p, q))).collect();
        Self { n_spatial, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        self.pairs[index]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    #[inline]
    pub fn index(&self, p: usize, q: usize) -> usize {
        debug_assert!(p < q);
        let m = 2 * self.n_spatial;
        p * m - p * (p + 1) / 2 + (q - p - 1)
    }

    pub fn spin(&self, index: usize) -> PairSpin {
        let (p, q) = self.pairs[index];
        match (p < self.n_spatial, q < self.n_spatial) {
            (true, true) => PairSpin::AlphaAlpha,
            (false, false) => PairSpin::BetaBeta,
            _ => PairSpin::AlphaBeta,
        }
    }
}

/// One nonzero matrix element `<det[to]| a†_p a†_q a_t a_s |det[from]> = phase`
/// with `bra_pair = (p, q)` and `ket_pair = (s, t)`, both canonical.
#[derive(Debug, Clone, Copy)]
pub struct TwoBodyLink {
    pub from: usize,
    pub to: usize,
    pub bra_pair: usize,
    pub ket_pair: usize,
    pub phase: f64,
}

/// All determinants of a fixed `(N_alpha, N_beta)` sector in ascending
/// bitmask order.
#[derive(Debug)]
pub struct SectorBasis {
    n_spatial: usize,
    n_alpha: usize,
    n_beta: usize,
    determinants: Vec<Determinant>,
    index_of: HashMap<Determinant, usize>,
    pairs: PairIndex,
    links: OnceLock<Vec<TwoBodyLink>>,
}

/// All `n`-bit masks with `k` bits set, ascending (Gosper's hack).
fn combinations(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut mask = (1u64 << k) - 1;
    while mask < limit {
        out.push(mask);
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    out
}

impl SectorBasis {
    pub fn new(n_spatial: usize, n_alpha: usize, n_beta: usize) -> Self {
        assert!((1..=32).contains(&n_spatial), "n_spatial must lie in 1..=32");
        assert!(n_alpha <= n_spatial && n_beta <= n_spatial, "occupation counts exceed the orbital count");
        let alpha = combinations(n_spatial, n_alpha);
        let beta = combinations(n_spatial, n_beta);
        let mut determinants: Vec<Determinant> = beta
            .iter()
            .flat_map(|&b| alpha.iter().map(move |&a| Determinant(a | (b << n_spatial))))
            .collect();
        determinants.sort_unstable();
        let index_of = determinants.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        Self {
            n_spatial,
            n_alpha,
            n_beta,
            determinants,
            index_of,
            pairs: PairIndex::new(n_spatial),
            links: OnceLock::new(),
        }
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn n_electrons(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    pub fn len(&self) -> usize {
        self.determinants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.determinants.is_empty()
    }

    pub fn determinants(&self) -> &[Determinant] {
        &self.determinants
    }

    pub fn determinant(&self, index: usize) -> Determinant {
        self.determinants[index]
    }

    pub fn index_of(&self, det: Determinant) -> Option<usize> {
        self.index_of.get(&det).copied()
    }

    pub fn pairs(&self) -> &PairIndex {
        &self.pairs
    }

    /// True when both bases describe the same sector.
    pub fn same_sector(&self, other: &SectorBasis) -> bool {
        self.n_spatial == other.n_spatial && self.n_alpha == other.n_alpha && self.n_beta == other.n_beta
    }

    /// Every S_z-conserving two-body excitation `a†_p a†_q a_t a_s` connecting
    /// two determinants of this sector. Built on first use.
    pub fn two_body_links(&self) -> &[TwoBodyLink] {
        self.links.get_or_init(|| self.build_links())
    }

    fn build_links(&self) -> Vec<TwoBodyLink> {
        let n_spin = self.n_spin_orbitals();
        let mut links = Vec::new();
        for (from, &det) in self.determinants.iter().enumerate() {
            let occupied: Vec<usize> = det.occupied().collect();
            for (a, &s) in occupied.iter().enumerate() {
                for &t in &occupied[a + 1..] {
                    let ket_pair = self.pairs.index(s, t);
                    let ket_spin = self.pairs.spin(ket_pair);
                    let Some((removed, _)) = apply_excitation(det, &[], &[t, s]) else { continue };
                    for p in 0..n_spin {
                        if removed.is_occupied(p) {
                            continue;
                        }
                        for q in p + 1..n_spin {
                            if removed.is_occupied(q) {
                                continue;
                            }
                            let bra_pair = self.pairs.index(p, q);
                            if self.pairs.spin(bra_pair) != ket_spin {
                                continue;
                            }
                            let (target, phase) =
                                apply_excitation(det, &[p, q], &[t, s]).expect("excitation onto empty orbitals");
                            let to = self.index_of[&target];
                            links.push(TwoBodyLink { from, to, bra_pair, ket_pair, phase });
                        }
                    }
                }
            }
        }
        links
    }
}
