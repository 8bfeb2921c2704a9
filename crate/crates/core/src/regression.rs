//! Linear regression: least squares, ridge, LASSO, elastic net and the
//! generalized LASSO, plus the closed-form ridge bias–variance curve.
//!
//! Estimators use the solver convention `‖Xβ − y‖² + λ²Ω(β)`.
//! [`ridge_bias_variance`] instead follows the textbook ridge formula with
//! `(XᵀX + λI)`, so its `λ` equals the square of the solver's.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::direct::tikhonov_classic;
use crate::error::{check_dim, domain, Result};
use crate::iterative::{admm, fista, AdmmPenalty, StopRule};
use crate::linalg::{pinv_left, svd, vstack, vstack_vec, DenseMatrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Columns `t⁰, t¹, …, t^degree`.
    Poly { degree: usize },
    /// Columns `cos(t), sin(t), cos(2t), sin(2t), …` up to `freqs`.
    Trig { freqs: usize },
}

/// Regressor matrix with no all-zero column.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix(DenseMatrix);

impl DesignMatrix {
    pub fn new(x: DenseMatrix) -> Result<Self> {
        if x.ncols() == 0 || x.nrows() == 0 {
            return Err(domain("empty design matrix"));
        }
        if x.column_iter().any(|c| c.iter().all(|v| *v == 0.0)) {
            return Err(domain("design matrix has an all-zero column"));
        }
        Ok(Self(x))
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_inner(self) -> DenseMatrix {
        self.0
    }
}

pub fn build_design(basis: Basis, t: &[f64]) -> Result<DesignMatrix> {
    if t.is_empty() {
        return Err(domain("no nodes"));
    }
    let x = match basis {
        Basis::Poly { degree } => {
            DenseMatrix::from_fn(t.len(), degree + 1, |i, j| t[i].powi(j as i32))
        }
        Basis::Trig { freqs } => {
            if freqs == 0 {
                return Err(domain("need at least one frequency"));
            }
            DenseMatrix::from_fn(t.len(), 2 * freqs, |i, j| {
                let k = (j / 2 + 1) as f64;
                if j % 2 == 0 {
                    (k * t[i]).cos()
                } else {
                    (k * t[i]).sin()
                }
            })
        }
    };
    DesignMatrix::new(x)
}

/// Ordinary least squares through the left pseudoinverse.
pub fn ols(x: &DenseMatrix, y: &Vector) -> Result<Vector> {
    check_dim(x.nrows(), y.len())?;
    Ok(pinv_left(x)? * y)
}

/// `argmin ‖Xβ − y‖² + λ²‖β‖²`.
pub fn ridge(x: &DenseMatrix, y: &Vector, lambda: f64) -> Result<Vector> {
    tikhonov_classic(x, y, lambda)
}

/// `argmin ‖Xβ − y‖² + λ²‖β‖₁` by FISTA. The solution is zero once
/// `λ² ≥ 2‖Xᵀy‖∞`.
pub fn lasso(x: &DenseMatrix, y: &Vector, lambda: f64, stop: StopRule) -> Result<Vector> {
    if !(lambda >= 0.0) {
        return Err(domain("lambda must be non-negative"));
    }
    Ok(fista(x, y, lambda, stop)?.x)
}

/// Smallest `λ` for which the LASSO solution is zero.
pub fn lasso_critical_lambda(x: &DenseMatrix, y: &Vector) -> f64 {
    (2.0 * x.tr_mul(y).amax()).sqrt()
}

/// `argmin ‖Xβ − y‖² + l1²‖β‖₁ + l2²‖β‖²`, solved as a LASSO on the
/// augmented system `[X; l2·I]β ≈ [y; 0]`.
pub fn elastic_net(
    x: &DenseMatrix,
    y: &Vector,
    l1: f64,
    l2: f64,
    stop: StopRule,
) -> Result<Vector> {
    check_dim(x.nrows(), y.len())?;
    if !(l2 >= 0.0) {
        return Err(domain("l2 must be non-negative"));
    }
    let n = x.ncols();
    let aug = vstack(&[x, &(DenseMatrix::identity(n, n) * l2)]);
    let rhs = vstack_vec(&[y, &Vector::zeros(n)]);
    lasso(&aug, &rhs, l1, stop)
}

/// `argmin ‖Xβ − y‖² + λ²‖Lβ‖₁` by ADMM.
pub fn gen_lasso(
    x: &DenseMatrix,
    y: &Vector,
    l: &DenseMatrix,
    lambda: f64,
    rho: f64,
    stop: StopRule,
) -> Result<Vector> {
    Ok(admm(x, y, lambda, rho, AdmmPenalty::L1(l), stop)?.x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasVariance {
    pub lambda: f64,
    pub variance: f64,
    pub bias2: f64,
    /// `variance + bias2`.
    pub mse: f64,
}

/// Ridge estimator error decomposition for noise variance `s²`:
///
/// ```text
/// variance(λ) = s² Σ σᵢ² / (σᵢ² + λ)²
/// bias²(λ)    = λ² βᵀ(XᵀX + λI)⁻²β
/// ```
///
/// Here `λ` is unsquared; it corresponds to `λ_solver²` in [`ridge`].
pub fn ridge_bias_variance(
    x: &DenseMatrix,
    beta: &Vector,
    noise_var: f64,
    grid: &[f64],
) -> Result<Vec<BiasVariance>> {
    check_dim(x.ncols(), beta.len())?;
    if !(noise_var >= 0.0) {
        return Err(domain("noise variance must be non-negative"));
    }
    if grid.iter().any(|l| !(*l >= 0.0)) {
        return Err(domain("lambda grid must be non-negative"));
    }
    let f = svd(x)?;
    let vb = &f.vt * beta;
    let outside = (beta.norm_squared() - vb.norm_squared()).max(0.0);
    let mut out = Vec::with_capacity(grid.len());
    for &lam in grid {
        let mut variance = 0.0;
        let mut bias2 = 0.0;
        for (i, &s) in f.sigmas.iter().enumerate() {
            let d = s * s + lam;
            if d > 0.0 {
                variance += s * s / (d * d);
                bias2 += (lam * vb[i] / d).powi(2);
            }
        }
        // directions outside the row space of X are shrunk to zero for any λ > 0
        if lam > 0.0 {
            bias2 += outside;
        }
        variance *= noise_var;
        out.push(BiasVariance {
            lambda: lam,
            variance,
            bias2,
            mse: variance + bias2,
        });
    }
    Ok(out)
}
