//! The variance-minimizing iteration: gradient, one-pair BFGS direction,
//! exact line search and exponential update.

mod bfgs;
mod gradient;
mod initial;
mod line_search;
mod objective;

use serde::{Deserialize, Serialize};

use crate::diagnostics::cse_norm;
use crate::error::{CqeError, Result};
use crate::hamiltonian::HamiltonianOperator;
use crate::measurement::MeasurementConfig;
use crate::spin::spin_expectations;
use crate::state::StateVector;

pub use bfgs::{bfgs_direction, BfgsPair};
pub use gradient::{assemble_gradient, evaluate_exact, variance_gradient, Evaluation};
pub use initial::{initial_state, Combo, OccupationSpec};
pub use line_search::{line_search, LineSearchOutcome, MIN_STEP};
pub use objective::{EmulatedObjective, ExactObjective, VarianceObjective};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum GradientMode {
    Exact,
    Emulated(MeasurementConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Variance convergence threshold (hartree^2).
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Largest rotation `||alpha D||` a line search may take.
    pub alpha_max: f64,
    /// Line-search tolerance in the step length.
    pub line_search_tol: f64,
    pub gradient_mode: GradientMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { epsilon: 1e-6, max_iterations: 200, alpha_max: 1.0, line_search_tol: 1e-10, gradient_mode: GradientMode::Exact }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CqeError::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.alpha_max > 0.0 && self.alpha_max.is_finite()) {
            return Err(CqeError::InvalidConfig(format!("alpha_max must be positive, got {}", self.alpha_max)));
        }
        if !(self.line_search_tol > 0.0) {
            return Err(CqeError::InvalidConfig("line-search tolerance must be positive".into()));
        }
        if let GradientMode::Emulated(m) = &self.gradient_mode {
            m.validate()?;
        }
        Ok(())
    }
}

/// One row of the iteration trace. `variance` is the value the solver acted
/// on (measured in emulated mode); `exact_variance` is always `||(H - E) psi||^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub iteration: usize,
    pub energy: f64,
    pub variance: f64,
    pub exact_variance: f64,
    pub cse_norm: f64,
    pub gradient_norm: f64,
    pub step_length: f64,
    pub sz: f64,
    pub s_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    Stagnation,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub state: StateVector,
    /// Diagnostics of the starting state (iteration 0).
    pub initial: ConvergenceRecord,
    /// One record per accepted update.
    pub trace: Vec<ConvergenceRecord>,
    pub termination: Termination,
}

impl SolveOutcome {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn last(&self) -> &ConvergenceRecord {
        self.trace.last().unwrap_or(&self.initial)
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

fn record(iteration: usize, psi: &StateVector, ham: &HamiltonianOperator, eval: &Evaluation, step_length: f64) -> ConvergenceRecord {
    let spin = spin_expectations(psi);
    ConvergenceRecord {
        iteration,
        energy: eval.energy,
        variance: eval.variance,
        exact_variance: ham.variance(psi),
        cse_norm: cse_norm(psi, ham),
        gradient_norm: eval.gradient.norm(),
        step_length,
        sz: spin.sz,
        s_squared: spin.s_squared,
    }
}

/// Runs the iteration from `initial` until the variance drops below
/// `epsilon`, the iteration budget runs out, or the line search stalls.
/// Non-convergence is reported in the outcome, not as an error.
pub fn solve(ham: &HamiltonianOperator, initial: &StateVector, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    initial.assert_same_sector(ham.basis());
    match &config.gradient_mode {
        GradientMode::Exact => solve_with(&ExactObjective { ham }, initial, config),
        GradientMode::Emulated(m) => solve_with(&EmulatedObjective { ham, config: m }, initial, config),
    }
}

pub fn solve_with(objective: &dyn VarianceObjective, initial: &StateVector, config: &SolverConfig) -> Result<SolveOutcome> {
    let ham = objective.hamiltonian();
    let mut psi = initial.clone().normalized();
    let mut eval = objective.evaluate(&psi)?;
    let initial_record = record(0, &psi, ham, &eval, 0.0);
    let mut trace = Vec::new();
    let mut memory: Option<BfgsPair> = None;
    let termination = loop {
        if eval.variance < config.epsilon {
            break Termination::Converged;
        }
        if trace.len() >= config.max_iterations {
            break Termination::MaxIterations;
        }
        let direction = bfgs_direction(&eval.gradient, &mut memory);
        if direction.is_zero() {
            break Termination::Stagnation;
        }
        let step = match line_search(objective, &psi, &eval.gradient, &direction, config.alpha_max, config.line_search_tol) {
            Ok(step) => step,
            Err(CqeError::Stagnation { .. }) => break Termination::Stagnation,
            Err(e) => return Err(e),
        };
        psi = step.state;
        let next = objective.evaluate(&psi)?;
        let s = direction.scaled(step.alpha);
        memory = Some(BfgsPair { gradient_change: next.gradient.sub(&eval.gradient), step: s.clone() });
        eval = next;
        trace.push(record(trace.len() + 1, &psi, ham, &eval, s.norm()));
    };
    Ok(SolveOutcome { state: psi, initial: initial_record, trace, termination })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fci::{diagonalize, identify_state};
    use crate::fock::SectorBasis;
    use crate::test_support::fixture_integrals;
    use std::sync::Arc;

    fn h4(na: usize, nb: usize) -> HamiltonianOperator {
        HamiltonianOperator::new(Arc::new(fixture_integrals("h4_linear_1.00.fcidump")), Arc::new(SectorBasis::new(4, na, nb)))
    }

    #[test]
    fn eigenvector_converges_immediately() {
        let ham = h4(2, 2);
        let spec = diagonalize(&ham).unwrap();
        let out = solve(&ham, &spec.eigenvectors[2], &SolverConfig::default()).unwrap();
        assert!(out.converged());
        assert!(out.trace.is_empty());
        assert!(out.initial.variance < 1e-20);
    }

    #[test]
    fn h4_ground_state_from_hartree_fock() {
        let ham = h4(2, 2);
        let psi0 = initial_state(ham.basis(), &OccupationSpec::determinant(&[0, 1], &[0, 1])).unwrap();
        let out = solve(&ham, &psi0, &SolverConfig::default()).unwrap();
        assert!(out.converged(), "{:?}", out.termination);
        let last = out.last();
        assert!((last.energy - -2.18096635).abs() < 1e-5);
        let mut previous = out.initial.variance;
        for r in &out.trace {
            assert!(r.variance < previous);
            previous = r.variance;
        }
        let spec = diagonalize(&ham).unwrap();
        let id = identify_state(&out.state, &spec);
        assert_eq!(id.index, 0);
        assert!(id.overlap > 0.999);
    }

    #[test]
    fn h4_high_spin_triplet() {
        let ham = h4(3, 1);
        let psi0 = initial_state(ham.basis(), &OccupationSpec::determinant(&[0, 1, 2], &[0])).unwrap();
        let out = solve(&ham, &psi0, &SolverConfig::default()).unwrap();
        assert!(out.converged());
        assert!((out.last().energy - -1.95019128).abs() < 1e-5);
        assert!((out.last().s_squared - 2.0).abs() < 1e-6);
    }

    #[test]
    fn truncated_run_reports_non_convergence() {
        let ham = h4(2, 2);
        let psi0 = initial_state(ham.basis(), &OccupationSpec::determinant(&[0, 1], &[0, 1])).unwrap();
        let config = SolverConfig { max_iterations: 1, ..SolverConfig::default() };
        let out = solve(&ham, &psi0, &config).unwrap();
        assert_eq!(out.termination, Termination::MaxIterations);
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let ham = h4(2, 2);
        let psi0 = initial_state(ham.basis(), &OccupationSpec::determinant(&[0, 1], &[0, 1])).unwrap();
        for config in [
            SolverConfig { epsilon: 0.0, ..SolverConfig::default() },
            SolverConfig { alpha_max: -1.0, ..SolverConfig::default() },
        ] {
            assert!(matches!(solve(&ham, &psi0, &config), Err(CqeError::InvalidConfig(_))));
        }
    }
}
