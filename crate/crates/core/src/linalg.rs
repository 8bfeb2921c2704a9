//! Dense vectors and matrices, ℓp norms, the SVD facade and pseudoinverses.
//!
//! [`Vector`] and [`DenseMatrix`] are plain nalgebra types. Constructors in this
//! module reject non-finite entries; the solvers assume finite inputs.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::error::{check_dim, domain, Error, Result};

pub type Vector = DVector<f64>;
pub type DenseMatrix = DMatrix<f64>;

/// Default relative rank tolerance.
pub const RANK_TOL: f64 = 1e-12;

/// Normal equations whose estimated condition number exceeds this are solved
/// through a QR factorization of the stacked system instead.
pub const NORMAL_EQ_COND_LIMIT: f64 = 1e10;

const COND_ITERS: usize = 30;

pub fn check_finite(data: &[f64]) -> Result<()> {
    if data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Builds a vector, rejecting NaN and infinities.
pub fn vector(data: &[f64]) -> Result<Vector> {
    check_finite(data)?;
    Ok(Vector::from_column_slice(data))
}

/// Builds a matrix from row-major entries.
pub fn matrix(rows: usize, cols: usize, row_major: &[f64]) -> Result<DenseMatrix> {
    check_dim(rows * cols, row_major.len())?;
    check_finite(row_major)?;
    Ok(DenseMatrix::from_row_slice(rows, cols, row_major))
}

/// ℓp norm. `p = 0` counts entries with magnitude above `1e-12`,
/// `p = f64::INFINITY` returns the largest magnitude and `0 < p < 1`
/// evaluates the same power-sum formula (a quasi-norm).
pub fn lp_norm(v: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 0.0 {
        return Err(domain("p must be non-negative"));
    }
    if p == 0.0 {
        return Ok(v.iter().filter(|x| x.abs() > 1e-12).count() as f64);
    }
    if p.is_infinite() {
        return Ok(v.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    if p == 1.0 {
        return Ok(v.iter().map(|x| x.abs()).sum());
    }
    if p == 2.0 {
        // scaled to avoid overflow on large entries
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return Ok(0.0);
        }
        let s: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
        return Ok(scale * s.sqrt());
    }
    let s: f64 = v.iter().map(|x| x.abs().powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

/// Thin singular value decomposition `A = U diag(σ) Vᵀ`.
///
/// With `r = min(m, n)`, `u` is `m × r` and `vt` is `r × n`; both have
/// orthonormal columns/rows. Singular values are sorted descending and each
/// column of `u` has its largest-magnitude entry positive.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub sigmas: Vec<f64>,
    pub vt: DenseMatrix,
}

impl SvdFactors {
    pub fn nrows(&self) -> usize {
        self.u.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.vt.ncols()
    }

    /// Number of singular values above `tol · σ₁`.
    pub fn rank(&self, tol: f64) -> usize {
        let s1 = self.sigmas.first().copied().unwrap_or(0.0);
        self.sigmas.iter().filter(|&&s| s > tol * s1).count()
    }

    /// `Uᵀy`, one coefficient per singular value.
    pub fn project(&self, y: &Vector) -> Result<Vector> {
        check_dim(self.nrows(), y.len())?;
        Ok(self.u.tr_mul(y))
    }

    /// `Σ wᵢ vᵢ` for spectral weights `w`.
    pub fn synthesize(&self, w: &Vector) -> Vector {
        self.vt.tr_mul(w)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigmas.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * &self.vt
    }
}

pub fn svd(a: &DenseMatrix) -> Result<SvdFactors> {
    if a.is_empty() {
        return Err(domain("empty matrix"));
    }
    check_finite(a.as_slice())?;
    let dec = a.clone().svd(true, true);
    let (u, vt) = match (dec.u, dec.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Solver("svd did not converge".into())),
    };
    let s = dec.singular_values;
    let r = s.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));

    let mut us = DenseMatrix::zeros(a.nrows(), r);
    let mut vts = DenseMatrix::zeros(r, a.ncols());
    let mut sigmas = Vec::with_capacity(r);
    for (k, &src) in order.iter().enumerate() {
        let col = u.column(src);
        let mut lead = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[lead].abs() {
                lead = i;
            }
        }
        let sign = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        us.set_column(k, &(col * sign));
        vts.set_row(k, &(vt.row(src) * sign));
        sigmas.push(s[src].max(0.0));
    }
    Ok(SvdFactors {
        u: us,
        sigmas,
        vt: vts,
    })
}

/// `σ₁/σ_r`, where `σ_r` is the smallest singular value above `rank_tol · σ₁`.
pub fn condition_number(a: &DenseMatrix, rank_tol: f64) -> Result<f64> {
    let f = svd(a)?;
    condition_from_sigmas(&f.sigmas, rank_tol)
}

pub fn condition_from_sigmas(sigmas: &[f64], rank_tol: f64) -> Result<f64> {
    let s1 = sigmas.first().copied().unwrap_or(0.0);
    if s1 == 0.0 {
        return Err(domain("zero matrix has no condition number"));
    }
    match sigmas.iter().rev().find(|&&s| s > rank_tol * s1) {
        Some(sr) => Ok(s1 / sr),
        None => Ok(f64::INFINITY),
    }
}

fn pinv_from_svd(f: &SvdFactors) -> DenseMatrix {
    let mut v = f.vt.transpose();
    for (j, s) in f.sigmas.iter().enumerate() {
        v.column_mut(j).scale_mut(1.0 / s);
    }
    v * f.u.transpose()
}

/// Left inverse `(AᵀA)⁻¹Aᵀ` of a full column rank matrix.
pub fn pinv_left(a: &DenseMatrix) -> Result<DenseMatrix> {
    let f = svd(a)?;
    if a.nrows() < a.ncols() || f.rank(RANK_TOL) < a.ncols() {
        return Err(Error::Singular);
    }
    Ok(pinv_from_svd(&f))
}

/// Right inverse `Aᵀ(AAᵀ)⁻¹` of a full row rank matrix.
pub fn pinv_right(a: &DenseMatrix) -> Result<DenseMatrix> {
    let f = svd(a)?;
    if a.ncols() < a.nrows() || f.rank(RANK_TOL) < a.nrows() {
        return Err(Error::Singular);
    }
    Ok(pinv_from_svd(&f))
}

/// Solves a square system by LU with partial pivoting.
pub fn solve_square(a: &DenseMatrix, b: &Vector) -> Result<Vector> {
    if !a.is_square() {
        return Err(domain("matrix must be square"));
    }
    check_dim(a.nrows(), b.len())?;
    let lu = a.clone().lu();
    let u = lu.u();
    let umax = u.diagonal().iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let umin = u
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |m, d| m.min(d.abs()));
    if umax == 0.0 || umin <= f64::EPSILON * umax {
        return Err(Error::Singular);
    }
    lu.solve(b).ok_or(Error::Singular)
}

/// Least-squares solution of a tall full-rank system through Householder QR.
pub fn lstsq_qr(a: &DenseMatrix, b: &Vector) -> Result<Vector> {
    check_dim(a.nrows(), b.len())?;
    if a.nrows() < a.ncols() {
        return Err(Error::Singular);
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let d = r.diagonal();
    let rmax = d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if rmax == 0.0 || d.iter().any(|x| x.abs() <= RANK_TOL * rmax) {
        return Err(Error::Singular);
    }
    let qtb = qr.q().tr_mul(b);
    r.solve_upper_triangular(&qtb).ok_or(Error::Singular)
}

/// Cholesky solve of a symmetric positive definite system. Returns the
/// solution and a condition estimate from power and inverse iteration.
pub fn solve_spd(m: &DenseMatrix, b: &Vector) -> Option<(Vector, f64)> {
    let ch = m.clone().cholesky()?;
    let n = m.nrows();
    let start = Vector::from_fn(n, |i, _| 1.0 + 1.0 / (1.0 + i as f64));
    let rayleigh = |step: &dyn Fn(&Vector) -> Vector| {
        let mut v = start.normalize();
        let mut est = 0.0;
        for _ in 0..COND_ITERS {
            let w = step(&v);
            est = v.dot(&w);
            let norm = w.norm();
            if !(norm > 0.0 && norm.is_finite()) {
                break;
            }
            v = w / norm;
        }
        est
    };
    let hi = rayleigh(&|v| m * v);
    let inv = rayleigh(&|v| ch.solve(v));
    let cond = if inv.is_finite() && inv > 0.0 {
        hi * inv
    } else {
        f64::INFINITY
    };
    Some((ch.solve(b), cond))
}

/// Solves normal equations `M x = b`; when Cholesky fails or is too badly
/// conditioned, falls back to QR on the stacked system built by `stacked`.
pub fn solve_normal_or_stacked<F>(m: &DenseMatrix, b: &Vector, stacked: F) -> Result<Vector>
where
    F: FnOnce() -> (DenseMatrix, Vector),
{
    if let Some((x, cond)) = solve_spd(m, b) {
        if cond <= NORMAL_EQ_COND_LIMIT && x.iter().all(|v| v.is_finite()) {
            return Ok(x);
        }
    }
    let (s, rhs) = stacked();
    lstsq_qr(&s, &rhs)
}

/// Stacks matrices vertically.
pub fn vstack(blocks: &[&DenseMatrix]) -> DenseMatrix {
    let cols = blocks.first().map(|b| b.ncols()).unwrap_or(0);
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DenseMatrix::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        out.view_mut((r0, 0), (b.nrows(), cols)).copy_from(*b);
        r0 += b.nrows();
    }
    out
}

pub fn vstack_vec(parts: &[&Vector]) -> Vector {
    let n: usize = parts.iter().map(|p| p.len()).sum();
    let mut out = Vector::zeros(n);
    let mut i0 = 0;
    for p in parts {
        out.rows_mut(i0, p.len()).copy_from(*p);
        i0 += p.len();
    }
    out
}

pub fn relative_error(x: &Vector, reference: &Vector) -> f64 {
    let d = (x - reference).norm();
    let r = reference.norm();
    if r == 0.0 {
        d
    } else {
        d / r
    }
}

pub fn mse(x: &[f64], reference: &[f64]) -> f64 {
    let n = x.len().max(1) as f64;
    x.iter()
        .zip(reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    if k == 0 {
                        lo
                    } else if k == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * k as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}
