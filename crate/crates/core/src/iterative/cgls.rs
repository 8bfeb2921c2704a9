use alloc::format;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use super::{residual_norm, QuadSolver, SolveReport, StopReason, StopRule};
use crate::error::{check_dim, domain, Result};
use crate::linalg::Vector;
use crate::operators::{spectral_norm_estimate, LinearOperator};

/// CGLS from `x₀ = 0`. The `k`-th iterate minimizes `‖Ax − y‖` over the
/// Krylov space `span{Aᵀy, (AᵀA)Aᵀy, …}`.
pub fn cgls<A: LinearOperator + ?Sized>(a: &A, y: &Vector, stop: StopRule) -> Result<SolveReport> {
    cgls_monitored(a, y, stop, |_, _| {})
}

/// [`cgls`] calling `monitor(k, x_k)` after every iteration.
pub fn cgls_monitored<A, M>(
    a: &A,
    y: &Vector,
    stop: StopRule,
    mut monitor: M,
) -> Result<SolveReport>
where
    A: LinearOperator + ?Sized,
    M: FnMut(usize, &Vector),
{
    check_dim(a.out_dim(), y.len())?;
    let mut rep = SolveReport::new(Vector::zeros(a.in_dim()));
    let mut r = y.clone();
    let mut s = a.apply_adjoint(&r);
    let mut p = s.clone();
    let mut gamma = s.norm_squared();
    let mut prev = r.norm_squared();
    rep.stop_reason = StopReason::MaxIterations;
    for k in 0..stop.max_iters {
        if gamma == 0.0 {
            rep.stop_reason = StopReason::Breakdown;
            break;
        }
        let q = a.apply(&p);
        let qq = q.norm_squared();
        if qq == 0.0 {
            rep.stop_reason = StopReason::Breakdown;
            break;
        }
        let alpha = gamma / qq;
        rep.x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &q, 1.0);
        s = a.apply_adjoint(&r);
        let gamma_new = s.norm_squared();
        p = &s + &p * (gamma_new / gamma);
        gamma = gamma_new;

        let obj = r.norm_squared();
        rep.push(obj, obj.sqrt(), rep.x.norm(), [0.0; 2]);
        monitor(k + 1, &rep.x);
        if stop.reached_discrepancy(obj.sqrt()) {
            rep.stop_reason = StopReason::Discrepancy;
            break;
        }
        if stop.converged(prev, obj) {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        prev = obj;
    }
    Ok(rep)
}

/// `x_{k+1} = x_k + ω Aᵀ(y − Ax_k)` from `x₀ = 0`. A step outside
/// `(0, 2/σ₁²)` is allowed but recorded in the report warnings.
pub fn landweber<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    step: f64,
    stop: StopRule,
) -> Result<SolveReport> {
    check_dim(a.out_dim(), y.len())?;
    if !step.is_finite() {
        return Err(domain("step must be finite"));
    }
    let mut rep = SolveReport::new(Vector::zeros(a.in_dim()));
    let s1 = spectral_norm_estimate(a, 100);
    let bound = 2.0 / (s1 * s1);
    if !(step > 0.0 && step < bound) {
        rep.warnings.push(format!(
            "step {step} outside (0, 2/sigma1^2) = (0, {bound})"
        ));
    }
    let mut prev = y.norm_squared();
    for _ in 0..stop.max_iters {
        let r = y - a.apply(&rep.x);
        rep.x.axpy(step, &a.apply_adjoint(&r), 1.0);
        let res = residual_norm(a, &rep.x, y);
        let obj = res * res;
        rep.push(obj, res, rep.x.norm(), [0.0; 2]);
        if !obj.is_finite() {
            rep.stop_reason = StopReason::Breakdown;
            break;
        }
        if stop.reached_discrepancy(res) {
            rep.stop_reason = StopReason::Discrepancy;
            break;
        }
        if stop.converged(prev, obj) {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        prev = obj;
    }
    Ok(rep)
}

/// `x_k = argmin ‖Ax − y‖² + λ²‖x − x_{k−1}‖²` from `x₀ = 0`.
///
/// The objective column records the full functional at each step and
/// `aux[0]` the proximal term `‖x_k − x_{k−1}‖²`.
pub fn disappearing_tikhonov<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    lambda: f64,
    stop: StopRule,
) -> Result<SolveReport> {
    check_dim(a.out_dim(), y.len())?;
    if !(lambda > 0.0) {
        return Err(domain("lambda must be positive"));
    }
    let l2 = lambda * lambda;
    let solver = QuadSolver::new(a, None, 1.0, 0.0, l2);
    let aty = a.apply_adjoint(y);
    let mut rep = SolveReport::new(Vector::zeros(a.in_dim()));
    let mut prev = f64::INFINITY;
    for _ in 0..stop.max_iters {
        let rhs = &aty + &rep.x * l2;
        let x_new = solver.solve(&rhs, &rep.x);
        let prox = (&x_new - &rep.x).norm_squared();
        rep.x = x_new;
        let res = residual_norm(a, &rep.x, y);
        let obj = res * res + l2 * prox;
        rep.push(obj, res, rep.x.norm(), [prox, 0.0]);
        if stop.reached_discrepancy(res) {
            rep.stop_reason = StopReason::Discrepancy;
            break;
        }
        if prox == 0.0 || stop.converged(prev, obj) {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        prev = obj;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn landweber_identity_one_step() {
        let a = DenseMatrix::identity(3, 3);
        let y = Vector::from_column_slice(&[1.0, -2.0, 0.5]);
        let rep = landweber(&a, &y, 1.0, StopRule::iters(1)).unwrap();
        assert!((rep.x - y).norm() < 1e-15);
        assert!(rep.warnings.is_empty());
    }

    #[test]
    fn landweber_flags_large_step() {
        let a = DenseMatrix::identity(2, 2);
        let rep = landweber(
            &a,
            &Vector::from_column_slice(&[1.0, 1.0]),
            3.0,
            StopRule::iters(5),
        )
        .unwrap();
        assert_eq!(rep.warnings.len(), 1);
        assert!(rep.history.last().unwrap().residual_norm > 1.0);
    }
}
