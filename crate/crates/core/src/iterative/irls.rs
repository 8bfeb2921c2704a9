#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use super::{cg, SolveReport, StopReason, StopRule};
use crate::error::{check_dim, domain, Result};
use crate::linalg::{
    lstsq_qr, solve_spd, vstack, vstack_vec, DenseMatrix, Vector, NORMAL_EQ_COND_LIMIT,
};
use crate::regmat::RegularizerSpec;

/// Linear solver used for each weighted least-squares step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    /// Cholesky on the weighted normal equations, QR on the stacked system
    /// when badly conditioned.
    Dense,
    /// Warm-started conjugate gradients on the normal equations.
    Cg { max_iters: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrlsConfig {
    /// Floor on residual magnitudes inside the weights.
    pub epsilon: f64,
    pub inner: InnerSolver,
    pub outer_iters: usize,
    /// Relative objective change that ends the outer loop; zero disables it.
    pub tol: f64,
}

impl Default for IrlsConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            inner: InnerSolver::Dense,
            outer_iters: 100,
            tol: 1e-12,
        }
    }
}

fn weights(r: &Vector, p: f64, eps: f64) -> Vector {
    r.map(|v| 0.5 * p * v.abs().max(eps).powf(p - 2.0))
}

fn pnorm_p(v: &Vector, p: f64) -> f64 {
    v.iter().map(|e| e.abs().powf(p)).sum()
}

/// IRLS for `‖Ax − y‖_p^p + λ²‖L(x − x*)‖_q^q`, `p = fidelity_p`, `q = reg_p`.
///
/// The first pass uses unit weights, i.e. it is the Tikhonov solution. Each
/// later pass uses `W = diag((p/2)·max(|r|, ε)^(p−2))` on the current
/// residuals and solves
/// `(AᵀW₁A + λ²LᵀW₂L) x = AᵀW₁y + λ²LᵀW₂Lx*`.
/// The `p/2` scale makes fixed points stationary for the functional above.
pub fn irls(
    a: &DenseMatrix,
    y: &Vector,
    cfg: &IrlsConfig,
    fidelity_p: f64,
    reg: &RegularizerSpec,
    reg_p: f64,
) -> Result<SolveReport> {
    check_dim(a.nrows(), y.len())?;
    check_dim(a.ncols(), reg.l.ncols())?;
    check_dim(a.ncols(), reg.x_ref.len())?;
    for p in [fidelity_p, reg_p] {
        if !(p > 0.0 && p <= 2.0) {
            return Err(domain("exponents must lie in (0, 2]"));
        }
    }
    if !(cfg.epsilon > 0.0) {
        return Err(domain("epsilon must be positive"));
    }
    let l2 = reg.lambda * reg.lambda;
    let lxr = &reg.l * &reg.x_ref;
    let objective = |x: &Vector| -> (f64, f64) {
        let r = a * x - y;
        let pen = pnorm_p(&(&reg.l * x - &lxr), reg_p);
        (pnorm_p(&r, fidelity_p) + l2 * pen, r.norm())
    };

    let mut rep = SolveReport::new(Vector::zeros(a.ncols()));
    let mut w1 = Vector::from_element(a.nrows(), 1.0);
    let mut w2 = Vector::from_element(reg.l.nrows(), 1.0);
    let mut prev = f64::INFINITY;
    let stop = StopRule {
        max_iters: cfg.outer_iters.max(1),
        tol: cfg.tol,
        discrepancy: None,
    };
    for _ in 0..stop.max_iters {
        let x = weighted_solve(a, y, &reg.l, &lxr, l2, &w1, &w2, cfg.inner, &rep.x)?;
        rep.x = x;
        let (obj, res) = objective(&rep.x);
        rep.push(obj, res, rep.x.norm(), [0.0; 2]);
        if stop.converged(prev, obj) {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        prev = obj;
        w1 = weights(&(a * &rep.x - y), fidelity_p, cfg.epsilon);
        w2 = weights(&(&reg.l * &rep.x - &lxr), reg_p, cfg.epsilon);
    }
    Ok(rep)
}

#[allow(clippy::too_many_arguments)]
fn weighted_solve(
    a: &DenseMatrix,
    y: &Vector,
    l: &DenseMatrix,
    lxr: &Vector,
    l2: f64,
    w1: &Vector,
    w2: &Vector,
    inner: InnerSolver,
    warm: &Vector,
) -> Result<Vector> {
    let mut wa = a.clone();
    for (i, w) in w1.iter().enumerate() {
        wa.row_mut(i).scale_mut(*w);
    }
    let mut wl = l.clone();
    for (i, w) in w2.iter().enumerate() {
        wl.row_mut(i).scale_mut(*w * l2);
    }
    let m = a.tr_mul(&wa) + l.tr_mul(&wl);
    let b = wa.tr_mul(y) + wl.tr_mul(lxr);
    match inner {
        InnerSolver::Cg { max_iters } => {
            Ok(cg(|v| &m * v, &b, warm.clone(), 1e-12, max_iters.max(1)))
        }
        InnerSolver::Dense => {
            if let Some((x, cond)) = solve_spd(&m, &b) {
                if cond <= NORMAL_EQ_COND_LIMIT {
                    return Ok(x);
                }
            }
            let sa = a.map_with_location(|i, _, v| v * w1[i].sqrt());
            let sl = l.map_with_location(|i, _, v| v * (l2 * w2[i]).sqrt());
            let sy = y.map_with_location(|i, _, v| v * w1[i].sqrt());
            let slx = lxr.map_with_location(|i, _, v| v * (l2 * w2[i]).sqrt());
            lstsq_qr(&vstack(&[&sa, &sl]), &vstack_vec(&[&sy, &slx]))
        }
    }
}
