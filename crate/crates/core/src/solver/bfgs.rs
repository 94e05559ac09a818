use crate::two_body::TwoBodyCoefficients;

/// The single stored `(s, y)` pair: last accepted step and the gradient
/// change it produced.
#[derive(Debug, Clone)]
pub struct BfgsPair {
    pub step: TwoBodyCoefficients,
    pub gradient_change: TwoBodyCoefficients,
}

/// Limited-memory BFGS direction with one stored pair.
///
/// Without memory this is `-g`. With a pair, the two-loop recursion runs
/// with initial inverse-Hessian scaling `s.y / y.y`. Non-positive curvature
/// discards the memory and falls back to `-g`.
pub fn bfgs_direction(gradient: &TwoBodyCoefficients, memory: &mut Option<BfgsPair>) -> TwoBodyCoefficients {
    if gradient.is_zero() {
        return TwoBodyCoefficients::zeros(gradient.n_spatial());
    }
    let Some(pair) = memory.as_ref() else {
        return gradient.scaled(-1.0);
    };
    let sy = pair.step.dot(&pair.gradient_change);
    let yy = pair.gradient_change.dot(&pair.gradient_change);
    if !(sy > 0.0) || !(yy > 0.0) {
        *memory = None;
        return gradient.scaled(-1.0);
    }
    let rho = 1.0 / sy;
    let mut q = gradient.clone();
    let a = rho * pair.step.dot(&q);
    q.axpy(-a, &pair.gradient_change);
    let mut r = q.scaled(sy / yy);
    let b = rho * pair.gradient_change.dot(&r);
    r.axpy(a - b, &pair.step);
    r.scale(-1.0);
    r
}
