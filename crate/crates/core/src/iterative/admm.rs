#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use super::prox::soft_threshold;
use super::{QuadSolver, SolveReport, StopReason, StopRule};
use crate::error::{check_dim, domain, Result};
use crate::linalg::Vector;
use crate::operators::LinearOperator;
use crate::regmat::Gradient2d;

/// Non-smooth penalty handled by [`admm`].
#[derive(Clone, Copy)]
pub enum AdmmPenalty<'a> {
    /// `‖Lx‖₁`
    L1(&'a dyn LinearOperator),
    /// `Σ |∂ᵥx| + |∂ₕx|` on an image of the given `(height, width)`.
    TvAniso { height: usize, width: usize },
    /// `Σ √(∂ᵥx² + ∂ₕx²)` on an image of the given `(height, width)`.
    TvIso { height: usize, width: usize },
}

fn group_norms(z: &Vector) -> impl Iterator<Item = f64> + '_ {
    let n = z.len() / 2;
    (0..n).map(move |k| (z[k] * z[k] + z[n + k] * z[n + k]).sqrt())
}

/// ADMM for `‖Ax − y‖² + λ²R(Dx)` with the split `z = Dx`:
///
/// ```text
/// x ← argmin ‖Ax − y‖² + (ρ/2)‖Dx − z + u‖²
/// z ← prox_{(λ²/ρ)R}(Dx + u)
/// u ← u + Dx − z
/// ```
///
/// `aux` holds the primal residual `‖Dx − z‖` and dual residual `ρ‖Dᵀ(z − z_prev)‖`.
pub fn admm<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    lambda: f64,
    rho: f64,
    penalty: AdmmPenalty<'_>,
    stop: StopRule,
) -> Result<SolveReport> {
    check_dim(a.out_dim(), y.len())?;
    if !(rho > 0.0) {
        return Err(domain("rho must be positive"));
    }
    if !(lambda >= 0.0) {
        return Err(domain("lambda must be non-negative"));
    }
    let grad;
    let (d, iso): (&dyn LinearOperator, bool) = match penalty {
        AdmmPenalty::L1(l) => (l, false),
        AdmmPenalty::TvAniso { height, width } | AdmmPenalty::TvIso { height, width } => {
            grad = Gradient2d::new(height, width);
            (&grad, matches!(penalty, AdmmPenalty::TvIso { .. }))
        }
    };
    check_dim(a.in_dim(), d.in_dim())?;

    let l2 = lambda * lambda;
    let thresh = l2 / rho;
    let penalty_value = |dx: &Vector| -> f64 {
        if iso {
            group_norms(dx).sum()
        } else {
            dx.lp_norm(1)
        }
    };
    let solver = QuadSolver::new(a, Some(d), 2.0, rho, 0.0);
    let aty2 = a.apply_adjoint(y) * 2.0;

    let mut rep = SolveReport::new(Vector::zeros(a.in_dim()));
    let mut z = Vector::zeros(d.out_dim());
    let mut u = Vector::zeros(d.out_dim());
    let mut prev = f64::INFINITY;
    for _ in 0..stop.max_iters {
        let rhs = &aty2 + d.apply_adjoint(&(&z - &u)) * rho;
        rep.x = solver.solve(&rhs, &rep.x);
        let dx = d.apply(&rep.x);
        let v = &dx + &u;
        let z_prev = z.clone();
        if iso {
            let n = v.len() / 2;
            for k in 0..n {
                let mag = (v[k] * v[k] + v[n + k] * v[n + k]).sqrt();
                let scale = if mag > thresh {
                    1.0 - thresh / mag
                } else {
                    0.0
                };
                z[k] = scale * v[k];
                z[n + k] = scale * v[n + k];
            }
        } else {
            z = v.map(|e| soft_threshold(e, thresh));
        }
        let primal = &dx - &z;
        u += &primal;
        let dual = d.apply_adjoint(&(&z - &z_prev)).norm() * rho;

        let res = (a.apply(&rep.x) - y).norm();
        let obj = res * res + l2 * penalty_value(&dx);
        rep.push(obj, res, rep.x.norm(), [primal.norm(), dual]);
        if stop.reached_discrepancy(res) {
            rep.stop_reason = StopReason::Discrepancy;
            break;
        }
        if stop.converged(prev, obj) && primal.norm() <= 1e-6 * (1.0 + dx.norm()) {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        prev = obj;
    }
    Ok(rep)
}
