use crate::error::Result;
use crate::hamiltonian::HamiltonianOperator;
use crate::measurement::{measure, MeasurementConfig};
use crate::state::StateVector;

use super::gradient::{evaluate_exact, Evaluation};

/// Source of the variance and its gradient: exact statevector algebra, or
/// the emulated measurement route.
pub trait VarianceObjective {
    fn hamiltonian(&self) -> &HamiltonianOperator;
    fn variance(&self, psi: &StateVector) -> Result<f64>;
    fn evaluate(&self, psi: &StateVector) -> Result<Evaluation>;
}

pub struct ExactObjective<'a> {
    pub ham: &'a HamiltonianOperator,
}

impl VarianceObjective for ExactObjective<'_> {
    fn hamiltonian(&self) -> &HamiltonianOperator {
        self.ham
    }

    fn variance(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.ham.variance(psi))
    }

    fn evaluate(&self, psi: &StateVector) -> Result<Evaluation> {
        Ok(evaluate_exact(psi, self.ham))
    }
}

pub struct EmulatedObjective<'a> {
    pub ham: &'a HamiltonianOperator,
    pub config: &'a MeasurementConfig,
}

impl VarianceObjective for EmulatedObjective<'_> {
    fn hamiltonian(&self) -> &HamiltonianOperator {
        self.ham
    }

    fn variance(&self, psi: &StateVector) -> Result<f64> {
        measure(psi, self.ham, self.config, false).map(|m| m.variance)
    }

    fn evaluate(&self, psi: &StateVector) -> Result<Evaluation> {
        let m = measure(psi, self.ham, self.config, true)?;
        Ok(Evaluation { energy: m.energy, variance: m.variance, gradient: m.gradient.expect("gradient requested") })
    }
}
