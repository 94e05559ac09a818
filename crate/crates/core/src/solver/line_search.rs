use crate::error::{CqeError, Result};
use crate::state::StateVector;
use crate::two_body::{GeneratorMatrix, TwoBodyCoefficients};

use super::objective::VarianceObjective;

/// Smallest step probed before giving up on a direction.
pub const MIN_STEP: f64 = 1e-12;

const GOLDEN: f64 = 0.381_966_011_250_105_1;
const MAX_BRENT_ITERATIONS: usize = 200;
const MAX_EXPANSIONS: usize = 60;

#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    pub state: StateVector,
    pub variance: f64,
    pub initial_variance: f64,
    pub evaluations: usize,
}

/// Minimizes `f(a) = variance(exp(a D) psi)` for `a` in
/// `[0, alpha_max / ||D||]`.
///
/// The first probe is `min(1, alpha_max / ||D||)`. A bracket is found by
/// doubling (on decrease) or halving (on increase), then refined with Brent's
/// method to `tol` in the step length. The returned variance never exceeds
/// `f(0)`. If `D` points uphill along `gradient` it is negated first.
pub fn line_search(
    objective: &dyn VarianceObjective,
    psi: &StateVector,
    gradient: &TwoBodyCoefficients,
    direction: &TwoBodyCoefficients,
    alpha_max: f64,
    tol: f64,
) -> Result<LineSearchOutcome> {
    let f0 = objective.variance(psi)?;
    let d_norm = direction.norm();
    if d_norm == 0.0 {
        return Ok(LineSearchOutcome { alpha: 0.0, state: psi.clone(), variance: f0, initial_variance: f0, evaluations: 1 });
    }
    let sign = if direction.dot(gradient) > 0.0 { -1.0 } else { 1.0 };
    let generator = GeneratorMatrix::new(direction, psi.basis().clone());

    let mut evaluations = 1;
    let mut best = (0.0, psi.clone(), f0);
    let mut f = |alpha: f64| -> Result<f64> {
        let state = generator.exp_apply(sign * alpha, psi)?;
        let value = objective.variance(&state)?;
        evaluations += 1;
        if value < best.2 {
            best = (alpha, state, value);
        }
        Ok(value)
    };

    let cap = alpha_max / d_norm;
    let first = cap.min(1.0);
    let f_first = f(first)?;
    let (lo, mid, hi, f_mid);
    if f_first < f0 {
        let (mut a, mut b, mut fb) = (0.0, first, f_first);
        let mut c = b;
        for _ in 0..MAX_EXPANSIONS {
            if b >= cap {
                c = cap;
                break;
            }
            let next = (2.0 * b).min(cap);
            let f_next = f(next)?;
            c = next;
            if f_next < fb {
                a = b;
                b = next;
                fb = f_next;
            } else {
                break;
            }
        }
        (lo, mid, hi, f_mid) = (a, b, c, fb);
    } else {
        let mut c = first;
        let mut b = first;
        loop {
            b *= 0.5;
            if b < MIN_STEP {
                return Err(CqeError::Stagnation { min_step: MIN_STEP });
            }
            let fb = f(b)?;
            if fb < f0 {
                (lo, mid, hi, f_mid) = (0.0, b, c, fb);
                break;
            }
            c = b;
        }
    }
    brent(&mut f, lo, mid, hi, f_mid, tol)?;
    let (alpha, state, variance) = best;
    Ok(LineSearchOutcome { alpha: sign * alpha, state, variance, initial_variance: f0, evaluations })
}

/// Brent's parabolic/golden-section minimizer on `[a, b]` starting from an
/// interior point `x` with known value `fx`.
fn brent(f: &mut impl FnMut(f64) -> Result<f64>, mut a: f64, x0: f64, mut b: f64, fx0: f64, tol: f64) -> Result<(f64, f64)> {
    let sqrt_eps = f64::EPSILON.sqrt();
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (fx0, fx0, fx0);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..MAX_BRENT_ITERATIONS {
        let xm = 0.5 * (a + b);
        let tol1 = sqrt_eps * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Ok((x, fx))
}
