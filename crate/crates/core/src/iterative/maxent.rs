#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use super::{SolveReport, StopReason, StopRule};
use crate::error::{check_dim, domain, Result};
use crate::linalg::Vector;
use crate::operators::LinearOperator;

const FLOOR: f64 = 1e-10;

/// Maximum entropy: `‖Ax − y‖² + λ² Σ xᵢ ln(ωᵢxᵢ)` over `x ≥ 1e-10`,
/// minimized by projected gradient with backtracking. The objective history
/// never increases and every iterate is strictly positive.
pub fn maxent<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    lambda: f64,
    omega: &Vector,
    stop: StopRule,
) -> Result<SolveReport> {
    check_dim(a.out_dim(), y.len())?;
    check_dim(a.in_dim(), omega.len())?;
    if omega.iter().any(|w| !(*w > 0.0)) {
        return Err(domain("omega must be strictly positive"));
    }
    if !(lambda >= 0.0) {
        return Err(domain("lambda must be non-negative"));
    }
    let l2 = lambda * lambda;
    let eval = |x: &Vector| -> (f64, f64) {
        let res = (a.apply(x) - y).norm();
        let ent: f64 = x
            .iter()
            .zip(omega.iter())
            .map(|(xi, wi)| xi * (wi * xi).ln())
            .sum();
        (res * res + l2 * ent, res)
    };
    let aty = a.apply_adjoint(y);

    // start from the entropy minimizer, blended with the back-projection scale
    let scale = (aty.amax()
        / a.apply_adjoint(&a.apply(&Vector::from_element(a.in_dim(), 1.0)))
            .amax()
            .max(1e-300))
    .clamp(1e-6, 1e6);
    let mut x = omega.map(|w| {
        if l2 > 0.0 {
            (1.0 / (core::f64::consts::E * w)).max(FLOOR)
        } else {
            scale
        }
    });
    let mut rep = SolveReport::new(x.clone());
    let (mut f, _) = eval(&x);
    let mut t = 1.0;
    for _ in 0..stop.max_iters {
        let mut g = (a.apply_adjoint(&a.apply(&x)) - &aty) * 2.0;
        for i in 0..g.len() {
            g[i] += l2 * ((omega[i] * x[i]).ln() + 1.0);
        }
        let mut accepted = None;
        for _ in 0..60 {
            let cand = (&x - &g * t).map(|v| v.max(FLOOR));
            let d = &cand - &x;
            let (fc, rc) = eval(&cand);
            if fc <= f + g.dot(&d) + d.norm_squared() / (2.0 * t) && fc <= f {
                accepted = Some((cand, fc, rc));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, fc, rc)) = accepted else {
            rep.stop_reason = StopReason::Breakdown;
            break;
        };
        let moved = cand != x;
        x = cand;
        rep.push(fc, rc, x.norm(), [0.0; 2]);
        let f_prev = f;
        f = fc;
        if !moved {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        if stop.reached_discrepancy(rc) {
            rep.stop_reason = StopReason::Discrepancy;
            break;
        }
        if stop.converged(f_prev, fc) {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        t *= 2.0;
    }
    rep.x = x;
    Ok(rep)
}
