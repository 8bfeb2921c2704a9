//! Closed-form solvers: naive inversion and the Tikhonov family.
//!
//! Every functional here is quadratic:
//!
//! ```text
//! J(x) = ‖Ax − y‖² + Σ λᵢ² ‖Lᵢ(x − xᵢ*)‖²
//! ```
//!
//! The normal equations are solved by Cholesky; when the factor looks worse
//! conditioned than `1e12` the stacked least-squares system is solved by QR
//! instead.

use alloc::vec::Vec;

use crate::error::{check_dim, domain, Result};
use crate::linalg::{
    lstsq_qr, solve_normal_or_stacked, solve_spd, solve_square, vstack, vstack_vec, DenseMatrix,
    Vector,
};
use crate::regmat::RegularizerSpec;

/// Solves `Ax = y` for square `A` with no stabilization.
pub fn naive_solve(a: &DenseMatrix, y: &Vector) -> Result<Vector> {
    solve_square(a, y)
}

fn check_regs(a: &DenseMatrix, y: &Vector, regs: &[RegularizerSpec]) -> Result<()> {
    check_dim(a.nrows(), y.len())?;
    for r in regs {
        check_dim(a.ncols(), r.l.ncols())?;
        check_dim(a.ncols(), r.x_ref.len())?;
        if !(r.lambda >= 0.0) || !r.lambda.is_finite() {
            return Err(domain("lambda must be finite and non-negative"));
        }
    }
    Ok(())
}

fn stacked_system(a: &DenseMatrix, y: &Vector, regs: &[RegularizerSpec]) -> (DenseMatrix, Vector) {
    let blocks: Vec<DenseMatrix> = regs.iter().map(|r| &r.l * r.lambda).collect();
    let rhs: Vec<Vector> = regs
        .iter()
        .zip(&blocks)
        .map(|(r, b)| b * &r.x_ref)
        .collect();
    let mut mats: Vec<&DenseMatrix> = alloc::vec![a];
    mats.extend(blocks.iter());
    let mut vecs: Vec<&Vector> = alloc::vec![y];
    vecs.extend(rhs.iter());
    (vstack(&mats), vstack_vec(&vecs))
}

/// `(AᵀA + Σλᵢ²LᵢᵀLᵢ)⁻¹(Aᵀy + Σλᵢ²LᵢᵀLᵢxᵢ*)`.
pub fn tikhonov_multi(a: &DenseMatrix, y: &Vector, regs: &[RegularizerSpec]) -> Result<Vector> {
    check_regs(a, y, regs)?;
    let mut m = a.tr_mul(a);
    let mut b = a.tr_mul(y);
    for r in regs {
        let l2 = r.lambda * r.lambda;
        if l2 == 0.0 {
            continue;
        }
        let ltl = r.l.tr_mul(&r.l);
        b += &ltl * &r.x_ref * l2;
        m += ltl * l2;
    }
    solve_normal_or_stacked(&m, &b, || stacked_system(a, y, regs))
}

/// `(AᵀA + λ²LᵀL)⁻¹(Aᵀy + λ²LᵀLx*)`. With `λ = 0` this is least squares.
pub fn tikhonov_general(a: &DenseMatrix, y: &Vector, reg: &RegularizerSpec) -> Result<Vector> {
    tikhonov_multi(a, y, core::slice::from_ref(reg))
}

/// Classical form, `L = I` and `x* = 0`.
pub fn tikhonov_classic(a: &DenseMatrix, y: &Vector, lambda: f64) -> Result<Vector> {
    tikhonov_general(a, y, &RegularizerSpec::identity(a.ncols(), lambda)?)
}

/// `Aᵀ(AAᵀ + λ²I)⁻¹y`, which only factors an `m × m` matrix.
pub fn tikhonov_data_form(a: &DenseMatrix, y: &Vector, lambda: f64) -> Result<Vector> {
    check_dim(a.nrows(), y.len())?;
    if !(lambda > 0.0) {
        return Err(domain("lambda must be positive"));
    }
    let mut g = a * a.transpose();
    for i in 0..g.nrows() {
        g[(i, i)] += lambda * lambda;
    }
    let z = match solve_spd(&g, y) {
        Some((z, _)) => z,
        None => solve_square(&g, y)?,
    };
    Ok(a.tr_mul(&z))
}

/// Least-squares solution of `[A; λ₁L₁; …] x ≈ [y; λ₁L₁x₁*; …]` by QR.
pub fn stacked_solve(a: &DenseMatrix, y: &Vector, regs: &[RegularizerSpec]) -> Result<Vector> {
    check_regs(a, y, regs)?;
    let (s, rhs) = stacked_system(a, y, regs);
    lstsq_qr(&s, &rhs)
}

/// Gradient of `‖Ax − y‖² + Σλᵢ²‖Lᵢ(x − xᵢ*)‖²` at `x`.
pub fn quadratic_gradient(
    a: &DenseMatrix,
    y: &Vector,
    regs: &[RegularizerSpec],
    x: &Vector,
) -> Vector {
    let mut g = a.tr_mul(&(a * x - y)) * 2.0;
    for r in regs {
        g += r.l.tr_mul(&(&r.l * (x - &r.x_ref))) * (2.0 * r.lambda * r.lambda);
    }
    g
}

/// One Newton step `x₁ = x₀ − H⁻¹∇J(x₀)` on the quadratic functional.
pub fn newton_step(
    a: &DenseMatrix,
    y: &Vector,
    regs: &[RegularizerSpec],
    x0: &Vector,
) -> Result<Vector> {
    check_regs(a, y, regs)?;
    check_dim(a.ncols(), x0.len())?;
    let mut h = a.tr_mul(a) * 2.0;
    for r in regs {
        h += r.l.tr_mul(&r.l) * (2.0 * r.lambda * r.lambda);
    }
    let g = quadratic_gradient(a, y, regs, x0);
    let step = match solve_spd(&h, &g) {
        Some((s, _)) => s,
        None => solve_square(&h, &g)?,
    };
    Ok(x0 - step)
}

/// Gaussian noise and prior written through whitening factors,
/// `Γₑ⁻¹ = LₑᵀLₑ` and `Γₚᵣ⁻¹ = LₚᵣᵀLₚᵣ`. Variance ratios are folded into `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    pub l_e: DenseMatrix,
    pub mu_e: Vector,
    pub l_pr: DenseMatrix,
    pub mu_x: Vector,
    pub lambda: f64,
}

impl GaussianModel {
    /// White noise and a white prior around zero.
    pub fn white(m: usize, n: usize, lambda: f64) -> Self {
        Self {
            l_e: DenseMatrix::identity(m, m),
            mu_e: Vector::zeros(m),
            l_pr: DenseMatrix::identity(n, n),
            mu_x: Vector::zeros(n),
            lambda,
        }
    }
}

/// MAP estimate `argmin ‖Lₑ(Ax − y − μₑ)‖² + λ²‖Lₚᵣ(x − μₓ)‖²`.
pub fn map_gaussian(a: &DenseMatrix, y: &Vector, model: &GaussianModel) -> Result<Vector> {
    check_dim(a.nrows(), y.len())?;
    check_dim(a.nrows(), model.l_e.ncols())?;
    check_dim(a.nrows(), model.mu_e.len())?;
    check_dim(a.ncols(), model.l_pr.ncols())?;
    check_dim(a.ncols(), model.mu_x.len())?;
    if !(model.lambda >= 0.0) {
        return Err(domain("lambda must be non-negative"));
    }
    let wa = &model.l_e * a;
    let wy = &model.l_e * (y + &model.mu_e);
    let lp = &model.l_pr * model.lambda;
    let lpm = &lp * &model.mu_x;
    lstsq_qr(&vstack(&[&wa, &lp]), &vstack_vec(&[&wy, &lpm]))
}
