use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CqeError, Result};
use crate::fock::{Determinant, SectorBasis};
use crate::state::StateVector;

/// Relative sign of the spin-flipped partner in a two-determinant guess.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combo {
    /// `(|d> + |d'>)/sqrt(2)`
    Singlet,
    /// `(|d> - |d'>)/sqrt(2)`
    Triplet,
}

impl Combo {
    pub fn phase(self) -> f64 {
        match self {
            Combo::Singlet => 1.0,
            Combo::Triplet => -1.0,
        }
    }
}

/// Initial wave function: one determinant, or an open-shell determinant
/// combined with its alpha/beta-swapped partner. Orbital indices are 0-based
/// spatial orbitals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupationSpec {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub combo: Option<Combo>,
}

impl OccupationSpec {
    pub fn determinant(alpha: &[usize], beta: &[usize]) -> Self {
        Self { alpha: alpha.to_vec(), beta: beta.to_vec(), combo: None }
    }

    pub fn pair(alpha: &[usize], beta: &[usize], combo: Combo) -> Self {
        Self { alpha: alpha.to_vec(), beta: beta.to_vec(), combo: Some(combo) }
    }

    fn check(&self, basis: &SectorBasis) -> Result<()> {
        let n = basis.n_spatial();
        for (label, list, expected) in [("alpha", &self.alpha, basis.n_alpha()), ("beta", &self.beta, basis.n_beta())] {
            if list.len() != expected {
                return Err(CqeError::InvalidOccupation(format!(
                    "{label} list has {} orbitals but the sector needs {expected}",
                    list.len()
                )));
            }
            if let Some(p) = list.iter().find(|&&p| p >= n) {
                return Err(CqeError::InvalidOccupation(format!("{label} orbital {p} outside 0..{n}")));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != list.len() {
                return Err(CqeError::InvalidOccupation(format!("{label} list repeats an orbital")));
            }
        }
        Ok(())
    }
}

/// Normalized guess supported on one or two determinants.
pub fn initial_state(basis: &Arc<SectorBasis>, spec: &OccupationSpec) -> Result<StateVector> {
    spec.check(basis)?;
    let n = basis.n_spatial();
    let det = Determinant::from_occupations(n, &spec.alpha, &spec.beta);
    let mut psi = StateVector::from_determinant(basis.clone(), det).expect("validated occupation lies in the sector");
    if let Some(combo) = spec.combo {
        let partner = det.spin_flipped(n);
        let Some(idx) = basis.index_of(partner) else {
            return Err(CqeError::InvalidOccupation(
                "spin-flipped partner lies outside the sector; combos need N_alpha = N_beta".into(),
            ));
        };
        if partner == det {
            if combo == Combo::Triplet {
                return Err(CqeError::InvalidOccupation(
                    "closed-shell determinant minus its own spin flip is the null state".into(),
                ));
            }
        } else {
            psi.coefficients_mut()[idx] = combo.phase();
        }
    }
    Ok(psi.normalized())
}
