//! Variance-based contracted quantum eigensolver.
//!
//! State-specific ground and excited electronic states are found by
//! repeatedly applying anti-Hermitian two-body exponentials
//! `|psi_{m+1}> = exp(F_{m+1}) |psi_m>` chosen to minimize the energy variance
//! `<psi|(H - E)^2|psi>`. Everything runs on an exact statevector over a fixed
//! `(N_alpha, N_beta)` determinant sector, with a dense FCI baseline for
//! comparison and an emulation of the ancilla-based measurement route for the
//! variance and its gradient.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod fci;
pub mod fock;
pub mod hamiltonian;
pub mod integrals;
pub mod measurement;
pub mod rdm;
pub mod runner;
pub mod solver;
pub mod sparse;
pub mod spin;
pub mod state;
pub mod two_body;

#[cfg(test)]
pub(crate) mod test_support;

pub use diagnostics::cse_norm;
pub use error::{CqeError, Result};
pub use fci::{diagonalize, eigenstate_overlap, identify_state, SpectrumResult, StateIdentification};
pub use fock::{apply_excitation, Determinant, SectorBasis};
pub use hamiltonian::HamiltonianOperator;
pub use integrals::{parse_fcidump, MolecularIntegrals};
pub use measurement::{delta_study, emulated_gradient_kernel, emulated_variance, measure, richardson, tilde_state, MeasurementConfig};
pub use rdm::{compute_2rdm, transition_2rdm, TwoRDM};
pub use solver::{
    bfgs_direction, initial_state, line_search, solve, variance_gradient, Combo, ConvergenceRecord, GradientMode, OccupationSpec,
    SolveOutcome, SolverConfig, Termination,
};
pub use spin::{spin_expectations, SpinExpectation};
pub use state::StateVector;
pub use two_body::{apply_two_body, exp_apply, GeneratorMatrix, TwoBodyCoefficients};
