//! Emulation of the ancilla-based measurement of the variance and its
//! gradient through `|psi~> = exp(i delta (H - E)) |psi>`, with Richardson
//! extrapolation over a ladder of `delta` values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CqeError, Result};
use crate::hamiltonian::HamiltonianOperator;
use crate::rdm::{compute_2rdm, transition_2rdm, TwoRDM};
use crate::solver::assemble_gradient;
use crate::state::{dot, StateVector};
use crate::two_body::{TwoBodyCoefficients, TAYLOR_MAX_TERMS, TAYLOR_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub deltas: Vec<f64>,
    /// How many ladder entries, from the largest `delta` down, enter the
    /// extrapolation. One means no extrapolation.
    pub richardson_levels: usize,
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        Self { deltas: vec![0.1, 0.05, 0.025], richardson_levels: 3 }
    }
}

impl MeasurementConfig {
    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(CqeError::InvalidConfig("empty delta ladder".into()));
        }
        if self.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(CqeError::InvalidConfig("every delta must be positive".into()));
        }
        if self.deltas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CqeError::InvalidConfig("deltas must be strictly decreasing".into()));
        }
        if self.richardson_levels == 0 || self.richardson_levels > self.deltas.len() {
            return Err(CqeError::InvalidConfig(format!(
                "richardson_levels must lie in 1..={}",
                self.deltas.len()
            )));
        }
        Ok(())
    }

    fn ladder(&self) -> &[f64] {
        &self.deltas[..self.richardson_levels]
    }
}

/// `exp(i delta (H - E)) |psi>` by Taylor series, split into substeps when
/// `delta ||H - E||_1` exceeds 2.
pub fn tilde_state(psi: &StateVector, ham: &HamiltonianOperator, energy: f64, delta: f64) -> Result<Vec<Complex64>> {
    psi.assert_same_sector(ham.basis());
    let mut v: Vec<Complex64> = psi.coefficients().iter().map(|&c| Complex64::new(c, 0.0)).collect();
    if delta == 0.0 {
        return Ok(v);
    }
    let bound = ham.matrix().norm_one() + energy.abs();
    let substeps = ((delta.abs() * bound) / 2.0).ceil().max(1.0) as usize;
    let h = delta / substeps as f64;
    let shifted = |x: &[f64]| -> Vec<f64> {
        let mut out = ham.apply_raw(x);
        for (o, xi) in out.iter_mut().zip(x) {
            *o -= energy * xi;
        }
        out
    };
    for _ in 0..substeps {
        let mut result = v.clone();
        let mut term = v.clone();
        let mut done = false;
        for k in 1..=TAYLOR_MAX_TERMS {
            let re: Vec<f64> = term.iter().map(|c| c.re).collect();
            let im: Vec<f64> = term.iter().map(|c| c.im).collect();
            let (hre, him) = (shifted(&re), shifted(&im));
            let factor = Complex64::new(0.0, h / k as f64);
            for (t, (a, b)) in term.iter_mut().zip(hre.into_iter().zip(him)) {
                *t = factor * Complex64::new(a, b);
            }
            for (r, t) in result.iter_mut().zip(&term) {
                *r += t;
            }
            let term_norm = term.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let result_norm = result.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if !term_norm.is_finite() {
                break;
            }
            if term_norm <= TAYLOR_TOLERANCE * result_norm {
                done = true;
                break;
            }
        }
        if !done {
            return Err(CqeError::SeriesDiverged { terms: TAYLOR_MAX_TERMS });
        }
        v = result;
    }
    Ok(v)
}

fn real_part(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|c| c.re).collect()
}

/// `(1 - Re<psi|psi~>) / (delta^2 / 2)`.
pub fn emulated_variance(psi: &StateVector, ham: &HamiltonianOperator, delta: f64) -> Result<f64> {
    let energy = ham.expectation(psi);
    let tilde = tilde_state(psi, ham, energy, delta)?;
    Ok((1.0 - dot(psi.coefficients(), &real_part(&tilde))) / (0.5 * delta * delta))
}

/// `(D_IJ - Re<psi|Gamma_IJ|psi~>) / (delta^2 / 2)`, an approximation of
/// `<psi|Gamma_IJ (H - E)^2|psi>`.
pub fn emulated_gradient_kernel(psi: &StateVector, ham: &HamiltonianOperator, delta: f64) -> Result<TwoRDM> {
    let energy = ham.expectation(psi);
    let tilde = tilde_state(psi, ham, energy, delta)?;
    Ok(kernel_from_tilde(psi, &compute_2rdm(psi), &tilde, delta))
}

fn kernel_from_tilde(psi: &StateVector, rdm: &TwoRDM, tilde: &[Complex64], delta: f64) -> TwoRDM {
    let t = transition_2rdm(psi, &real_part(tilde));
    let scale = 0.5 * delta * delta;
    let values = rdm.values().iter().zip(t.values()).map(|(d, t)| (d - t) / scale).collect();
    TwoRDM::from_values(rdm.n_spatial(), values)
}

/// Neville extrapolation to `delta = 0` in the variable `delta^2`.
///
/// Panics on repeated `delta` values.
pub fn richardson(values: &[(f64, f64)]) -> f64 {
    assert!(!values.is_empty(), "richardson needs at least one estimate");
    let x: Vec<f64> = values.iter().map(|(d, _)| d * d).collect();
    let mut p: Vec<f64> = values.iter().map(|(_, f)| *f).collect();
    neville_at_zero(&x, &mut p)
}

fn neville_at_zero(x: &[f64], p: &mut [f64]) -> f64 {
    let n = x.len();
    for k in 1..n {
        for i in 0..n - k {
            let (xi, xj) = (x[i], x[i + k]);
            assert!(xi != xj, "richardson received a repeated delta");
            p[i] = (xi * p[i + 1] - xj * p[i]) / (xi - xj);
        }
    }
    p[0]
}

/// Extrapolated measurement of one state.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub energy: f64,
    pub variance: f64,
    pub kernel: Option<TwoRDM>,
    pub gradient: Option<TwoBodyCoefficients>,
}

/// Energy, variance and (optionally) gradient from the emulated route,
/// extrapolated over the configured ladder.
pub fn measure(psi: &StateVector, ham: &HamiltonianOperator, config: &MeasurementConfig, with_gradient: bool) -> Result<Measurement> {
    let ladder = config.ladder();
    let energy = ham.expectation(psi);
    let rdm = with_gradient.then(|| compute_2rdm(psi));
    let mut variances = Vec::with_capacity(ladder.len());
    let mut kernels = Vec::with_capacity(ladder.len());
    for &delta in ladder {
        let tilde = tilde_state(psi, ham, energy, delta)?;
        variances.push((delta, (1.0 - dot(psi.coefficients(), &real_part(&tilde))) / (0.5 * delta * delta)));
        if let Some(rdm) = &rdm {
            kernels.push(kernel_from_tilde(psi, rdm, &tilde, delta));
        }
    }
    let variance = richardson(&variances);
    let (kernel, gradient) = match rdm {
        Some(rdm) => {
            let x: Vec<f64> = ladder.iter().map(|d| d * d).collect();
            let len = rdm.values().len();
            let mut values = vec![0.0; len];
            let mut column = vec![0.0; ladder.len()];
            for (e, out) in values.iter_mut().enumerate() {
                for (c, k) in column.iter_mut().zip(&kernels) {
                    *c = k.values()[e];
                }
                *out = neville_at_zero(&x, &mut column);
            }
            let kernel = TwoRDM::from_values(rdm.n_spatial(), values);
            let gradient = assemble_gradient(&kernel, &rdm, variance);
            (Some(kernel), Some(gradient))
        }
        None => (None, None),
    };
    Ok(Measurement { energy, variance, kernel, gradient })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub delta: f64,
    pub emulated: f64,
    pub exact: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaStudy {
    pub rows: Vec<DeltaRow>,
    pub richardson: f64,
    pub richardson_error: f64,
    /// Least-squares slope of `ln|error|` against `ln(delta)`; absent when
    /// any raw error is zero.
    pub slope: Option<f64>,
}

/// Emulated against exact variance over a `delta` ladder.
pub fn delta_study(psi: &StateVector, ham: &HamiltonianOperator, deltas: &[f64]) -> Result<DeltaStudy> {
    let exact = ham.variance(psi);
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let emulated = emulated_variance(psi, ham, delta)?;
        rows.push(DeltaRow { delta, emulated, exact, error: (emulated - exact).abs() });
    }
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.delta, r.emulated)).collect();
    let extrapolated = richardson(&pairs);
    Ok(DeltaStudy {
        slope: log_log_slope(&rows),
        richardson: extrapolated,
        richardson_error: (extrapolated - exact).abs(),
        rows,
    })
}

fn log_log_slope(rows: &[DeltaRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| !(r.error > 0.0)) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.delta.ln(), r.error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
