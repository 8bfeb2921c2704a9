//! Iterative and nonlinear solvers.
//!
//! Every solver returns a [`SolveReport`] whose history has one record per
//! iteration. Penalized functionals use the squared weight, e.g. FISTA
//! minimizes `‖Ax − y‖² + λ²‖x‖₁`.

mod admm;
mod cgls;
mod denoise;
mod irls;
mod maxent;
mod prox;
mod red;

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

pub use admm::{admm, AdmmPenalty};
pub use cgls::{cgls, cgls_monitored, disappearing_tikhonov, landweber};
pub use denoise::{
    median_denoiser, median_filter, Denoiser, FnDenoiser, IdentityDenoiser, MedianDenoiser,
};
pub use irls::{irls, InnerSolver, IrlsConfig};
pub use maxent::maxent;
pub use prox::{fista, ista, proximal_gradient, soft_threshold, ProxGradOptions};
pub use red::{pnp_admm, red, PnpConfig, RedConfig, RedScheme};

use crate::linalg::{DenseMatrix, Vector};
use crate::operators::LinearOperator;

/// When to stop an iterative solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_iters: usize,
    /// Stop once `|J_{k−1} − J_k| ≤ tol · |J_{k−1}|`; zero disables the test.
    pub tol: f64,
    /// Stop once the residual norm drops to this level.
    pub discrepancy: Option<f64>,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: 1e-8,
            discrepancy: None,
        }
    }
}

impl StopRule {
    pub fn iters(max_iters: usize) -> Self {
        Self {
            max_iters: max_iters.max(1),
            tol: 0.0,
            discrepancy: None,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_discrepancy(mut self, delta: f64) -> Self {
        self.discrepancy = Some(delta);
        self
    }

    fn converged(&self, prev: f64, cur: f64) -> bool {
        self.tol > 0.0 && prev.is_finite() && (prev - cur).abs() <= self.tol * prev.abs()
    }

    fn reached_discrepancy(&self, residual: f64) -> bool {
        matches!(self.discrepancy, Some(d) if residual <= d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    MaxIterations,
    Converged,
    Discrepancy,
    /// A search direction or step vanished.
    Breakdown,
}

/// One row of a solver history.
///
/// `aux` carries solver-specific monitors: ADMM and PnP store the primal and
/// dual residual norms, disappearing Tikhonov stores the proximal term
/// `‖x_k − x_{k−1}‖²` in `aux[0]`. Unused slots are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub objective: f64,
    pub residual_norm: f64,
    pub solution_norm: f64,
    pub aux: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x: Vector,
    pub history: Vec<IterRecord>,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl SolveReport {
    fn new(x: Vector) -> Self {
        Self {
            x,
            history: Vec::new(),
            stop_reason: StopReason::MaxIterations,
            iterations: 0,
            warnings: Vec::new(),
        }
    }

    fn push(&mut self, objective: f64, residual_norm: f64, solution_norm: f64, aux: [f64; 2]) {
        self.history.push(IterRecord {
            objective,
            residual_norm,
            solution_norm,
            aux,
        });
        self.iterations = self.history.len();
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.history.last().map(|r| r.objective)
    }
}

/// Conjugate gradients for a symmetric positive definite operator.
pub(crate) fn cg<F>(apply: F, b: &Vector, x0: Vector, rel_tol: f64, max_iters: usize) -> Vector
where
    F: Fn(&Vector) -> Vector,
{
    let mut x = x0;
    let mut r = b - apply(&x);
    let mut p = r.clone();
    let mut rr = r.norm_squared();
    let target = (rel_tol * b.norm()).powi(2);
    for _ in 0..max_iters {
        if rr <= target || rr == 0.0 {
            break;
        }
        let q = apply(&p);
        let pq = p.dot(&q);
        if pq <= 0.0 {
            break;
        }
        let alpha = rr / pq;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &q, 1.0);
        let rr_new = r.norm_squared();
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    x
}

/// Solves `(c·AᵀA + μ·DᵀD + ν·I) x = b`, factoring once when everything is
/// dense and small and falling back to warm-started CG otherwise.
pub(crate) enum QuadSolver<'a, A: LinearOperator + ?Sized> {
    Dense(nalgebra::linalg::Cholesky<f64, nalgebra::Dyn>),
    Cg {
        a: &'a A,
        d: Option<&'a dyn LinearOperator>,
        c: f64,
        mu: f64,
        nu: f64,
    },
}

impl<'a, A: LinearOperator + ?Sized> QuadSolver<'a, A> {
    pub(crate) fn new(
        a: &'a A,
        d: Option<&'a dyn LinearOperator>,
        c: f64,
        mu: f64,
        nu: f64,
    ) -> Self {
        let dense_d = match d {
            None => Some(None),
            Some(op) => op.as_dense().map(Some),
        };
        if let (Some(ad), Some(dd)) = (a.as_dense(), dense_d) {
            if ad.ncols() <= 4096 {
                let mut m: DenseMatrix = ad.tr_mul(ad) * c;
                if let Some(dm) = dd {
                    m += dm.tr_mul(dm) * mu;
                }
                for i in 0..m.nrows() {
                    m[(i, i)] += nu;
                }
                if let Some(ch) = m.cholesky() {
                    return Self::Dense(ch);
                }
            }
        }
        Self::Cg { a, d, c, mu, nu }
    }

    pub(crate) fn solve(&self, b: &Vector, warm: &Vector) -> Vector {
        match self {
            Self::Dense(ch) => ch.solve(b),
            Self::Cg { a, d, c, mu, nu } => {
                let apply = |v: &Vector| {
                    let mut out = a.apply_adjoint(&a.apply(v)) * *c;
                    if let Some(d) = d {
                        out += d.apply_adjoint(&d.apply(v)) * *mu;
                    }
                    if *nu != 0.0 {
                        out.axpy(*nu, v, 1.0);
                    }
                    out
                };
                let n = b.len();
                cg(apply, b, warm.clone(), 1e-12, (4 * n).clamp(50, 2000))
            }
        }
    }
}

fn residual_norm<A: LinearOperator + ?Sized>(a: &A, x: &Vector, y: &Vector) -> f64 {
    (a.apply(x) - y).norm()
}
