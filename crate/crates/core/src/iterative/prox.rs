#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use super::{SolveReport, StopReason, StopRule};
use crate::error::{check_dim, domain, Result};
use crate::linalg::Vector;
use crate::operators::{spectral_norm_estimate, LinearOperator};

/// `argmin_x ½(x − v)² + t|x| = sign(v)·max(|v| − t, 0)`.
#[inline]
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxGradOptions {
    /// Nesterov momentum with restart on objective increase.
    pub momentum: bool,
    /// Fixed step; defaults to `1/(2σ₁²)` with `σ₁` from power iteration.
    pub step: Option<f64>,
    pub x0: Option<Vector>,
}

impl Default for ProxGradOptions {
    fn default() -> Self {
        Self {
            momentum: true,
            step: None,
            x0: None,
        }
    }
}

fn l1_objective<A: LinearOperator + ?Sized>(a: &A, y: &Vector, l2: f64, x: &Vector) -> (f64, f64) {
    let res = (a.apply(x) - y).norm();
    (res * res + l2 * x.lp_norm(1), res)
}

/// Proximal gradient for `‖Ax − y‖² + λ²‖x‖₁`.
pub fn proximal_gradient<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    lambda: f64,
    opts: &ProxGradOptions,
    stop: StopRule,
) -> Result<SolveReport> {
    check_dim(a.out_dim(), y.len())?;
    if !(lambda >= 0.0) {
        return Err(domain("lambda must be non-negative"));
    }
    let n = a.in_dim();
    let l2 = lambda * lambda;
    let step = match opts.step {
        Some(s) if s > 0.0 => s,
        Some(_) => return Err(domain("step must be positive")),
        None => {
            // power iteration underestimates σ₁, so pad the Lipschitz constant
            let s1 = spectral_norm_estimate(a, 300);
            1.0 / (2.0 * 1.02 * s1 * s1 + 1e-300)
        }
    };
    let thresh = l2 * step;
    let x0 = match &opts.x0 {
        Some(x0) => {
            check_dim(n, x0.len())?;
            x0.clone()
        }
        None => Vector::zeros(n),
    };
    let aty = a.apply_adjoint(y);
    let prox_step = |z: &Vector| -> Vector {
        let g = a.apply_adjoint(&a.apply(z)) - &aty;
        let mut v = z - g * (2.0 * step);
        v.apply(|e| *e = soft_threshold(*e, thresh));
        v
    };

    let mut rep = SolveReport::new(x0.clone());
    let (mut f_prev, _) = l1_objective(a, y, l2, &x0);
    let mut z = x0;
    let mut t = 1.0_f64;
    for _ in 0..stop.max_iters {
        let mut x_new = prox_step(&z);
        let (mut f_new, mut res) = l1_objective(a, y, l2, &x_new);
        if opts.momentum && f_new > f_prev {
            t = 1.0;
            x_new = prox_step(&rep.x);
            (f_new, res) = l1_objective(a, y, l2, &x_new);
        }
        if opts.momentum {
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            z = &x_new + (&x_new - &rep.x) * ((t - 1.0) / t_new);
            t = t_new;
        } else {
            z = x_new.clone();
        }
        let moved = x_new != rep.x;
        rep.x = x_new;
        rep.push(f_new, res, rep.x.norm(), [0.0; 2]);
        if !moved {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        if stop.reached_discrepancy(res) {
            rep.stop_reason = StopReason::Discrepancy;
            break;
        }
        if stop.converged(f_prev, f_new) {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        f_prev = f_new;
    }
    Ok(rep)
}

/// FISTA for `‖Ax − y‖² + λ²‖x‖₁` with step `1/(2σ₁²)` and momentum restart.
pub fn fista<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    lambda: f64,
    stop: StopRule,
) -> Result<SolveReport> {
    proximal_gradient(a, y, lambda, &ProxGradOptions::default(), stop)
}

/// ISTA: [`fista`] without momentum. Its objective never increases.
pub fn ista<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    lambda: f64,
    stop: StopRule,
) -> Result<SolveReport> {
    let opts = ProxGradOptions {
        momentum: false,
        ..ProxGradOptions::default()
    };
    proximal_gradient(a, y, lambda, &opts, stop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn scalar_prox() {
        let a = DenseMatrix::identity(1, 1);
        let y = Vector::from_column_slice(&[3.0]);
        let opts = ProxGradOptions {
            momentum: false,
            step: Some(0.5),
            x0: None,
        };
        let rep = proximal_gradient(&a, &y, 2.0_f64.sqrt(), &opts, StopRule::iters(20)).unwrap();
        assert!((rep.x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero() {
        let a = DenseMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0]);
        let rep = fista(&a, &Vector::zeros(2), 0.5, StopRule::default()).unwrap();
        assert_eq!(rep.x, Vector::zeros(3));
    }
}
