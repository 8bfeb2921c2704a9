//! Regularization-parameter selection: L-curve corner, GCV and the
//! discrepancy principle.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::direct::tikhonov_general;
use crate::error::{check_dim, domain, Error, Result};
use crate::linalg::{DenseMatrix, SvdFactors, Vector};
use crate::regmat::RegularizerSpec;
use crate::spectral::{filter_factors, FilterKind};

/// A one-parameter family of Tikhonov solutions `x_λ`.
#[derive(Debug, Clone, Copy)]
pub enum TikhonovPath<'a> {
    /// Classical form through a precomputed SVD of `A`.
    Spectral { svd: &'a SvdFactors, y: &'a Vector },
    /// General form `‖Ax − y‖² + λ²‖Lx‖²` through the normal equations.
    General {
        a: &'a DenseMatrix,
        y: &'a Vector,
        l: &'a DenseMatrix,
    },
}

/// Residual and (semi)norm of one point on the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub residual_norm: f64,
    pub solution_norm: f64,
}

impl TikhonovPath<'_> {
    pub fn solve(&self, lambda: f64) -> Result<Vector> {
        match *self {
            Self::Spectral { svd, y } => crate::spectral::tikhonov_svd_solve(svd, y, lambda),
            Self::General { a, y, l } => {
                let reg = RegularizerSpec::new(l.clone(), lambda)?;
                tikhonov_general(a, y, &reg)
            }
        }
    }

    pub fn point(&self, lambda: f64) -> Result<PathPoint> {
        if !(lambda > 0.0) {
            return Err(domain("lambda must be positive"));
        }
        match *self {
            Self::Spectral { svd, y } => {
                let c = svd.project(y)?;
                let outside = (y.norm_squared() - c.norm_squared()).max(0.0);
                let l2 = lambda * lambda;
                let (mut r2, mut x2) = (outside, 0.0);
                for (i, ci) in c.iter().enumerate() {
                    let s = svd.sigmas[i];
                    let damp = l2 / (s * s + l2);
                    r2 += (damp * ci).powi(2);
                    x2 += (s * ci / (s * s + l2)).powi(2);
                }
                Ok(PathPoint {
                    residual_norm: r2.sqrt(),
                    solution_norm: x2.sqrt(),
                })
            }
            Self::General { a, y, l } => {
                let x = self.solve(lambda)?;
                Ok(PathPoint {
                    residual_norm: (a * &x - y).norm(),
                    solution_norm: (l * &x).norm(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LCurve {
    pub lambdas: Vec<f64>,
    pub log_residual: Vec<f64>,
    pub log_solution: Vec<f64>,
    /// Signed three-point curvature; zero at the two endpoints.
    pub curvature: Vec<f64>,
    pub corner: usize,
}

impl LCurve {
    pub fn corner_lambda(&self) -> f64 {
        self.lambdas[self.corner]
    }
}

fn check_grid(grid: &[f64], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(domain("lambda grid too short"));
    }
    if grid.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(domain("lambda grid must be positive"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("lambda grid must be strictly increasing"));
    }
    Ok(())
}

/// Curvature of the circle through three points, positive for a
/// counter-clockwise turn.
pub fn three_point_curvature(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    let (ax, ay) = (p1.0 - p0.0, p1.1 - p0.1);
    let (bx, by) = (p2.0 - p1.0, p2.1 - p1.1);
    let (cx, cy) = (p2.0 - p0.0, p2.1 - p0.1);
    let denom = (ax.hypot(ay)) * (bx.hypot(by)) * (cx.hypot(cy));
    if denom == 0.0 {
        0.0
    } else {
        2.0 * (ax * by - ay * bx) / denom
    }
}

/// L-curve on `(log ‖Ax_λ − y‖, log ‖Lx_λ‖)`; the corner is the interior
/// grid point of largest signed curvature.
pub fn lcurve(path: &TikhonovPath<'_>, grid: &[f64]) -> Result<LCurve> {
    check_grid(grid, 5)?;
    let mut log_residual = Vec::with_capacity(grid.len());
    let mut log_solution = Vec::with_capacity(grid.len());
    for &l in grid {
        let p = path.point(l)?;
        log_residual.push(p.residual_norm.ln());
        log_solution.push(p.solution_norm.ln());
    }
    let n = grid.len();
    let mut curvature = alloc::vec![0.0; n];
    for k in 1..n - 1 {
        curvature[k] = three_point_curvature(
            (log_residual[k - 1], log_solution[k - 1]),
            (log_residual[k], log_solution[k]),
            (log_residual[k + 1], log_solution[k + 1]),
        );
    }
    let mut corner = 1;
    for k in 1..n - 1 {
        if curvature[k] > curvature[corner] {
            corner = k;
        }
    }
    Ok(LCurve {
        lambdas: grid.to_vec(),
        log_residual,
        log_solution,
        curvature,
        corner,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcvResult {
    pub lambdas: Vec<f64>,
    pub g: Vec<f64>,
    pub index: usize,
    pub lambda_star: f64,
}

/// `G(λ) = m‖Ax_λ − y‖² / (m − Σφᵢ(λ))²`, minimized over the grid.
pub fn gcv(svd: &SvdFactors, y: &Vector, grid: &[f64]) -> Result<GcvResult> {
    check_grid(grid, 1)?;
    check_dim(svd.nrows(), y.len())?;
    let m = y.len() as f64;
    let path = TikhonovPath::Spectral { svd, y };
    let mut g = Vec::with_capacity(grid.len());
    for &l in grid {
        let phi = filter_factors(&svd.sigmas, l, FilterKind::Tikhonov)?;
        let trace = m - phi.phi.iter().sum::<f64>();
        if !(trace > 0.0) {
            return Err(domain("degenerate GCV denominator"));
        }
        let r = path.point(l)?.residual_norm;
        g.push(m * r * r / (trace * trace));
    }
    let mut index = 0;
    for k in 1..g.len() {
        if g[k] < g[index] {
            index = k;
        }
    }
    Ok(GcvResult {
        lambdas: grid.to_vec(),
        lambda_star: grid[index],
        index,
        g,
    })
}

/// Bisection in `log λ` for `‖Ax_λ − y‖ = δ` inside `bracket`, to a relative
/// residual tolerance of `1e-6`.
pub fn discrepancy(path: &TikhonovPath<'_>, delta: f64, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo && delta > 0.0) {
        return Err(domain("bracket must satisfy 0 < lo < hi and delta > 0"));
    }
    let r_lo = path.point(lo)?.residual_norm;
    let r_hi = path.point(hi)?.residual_norm;
    if !(r_lo < delta && delta < r_hi) {
        return Err(Error::InvalidBracket {
            lo: r_lo,
            hi: r_hi,
            target: delta,
        });
    }
    let mut best = (f64::INFINITY, lo);
    for _ in 0..200 {
        let mid = (lo.ln() + 0.5 * (hi.ln() - lo.ln())).exp();
        let r = path.point(mid)?.residual_norm;
        let gap = (r - delta).abs();
        if gap < best.0 {
            best = (gap, mid);
        }
        if gap <= 1e-6 * delta {
            return Ok(mid);
        }
        if r < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_of_unit_circle() {
        let k = three_point_curvature((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0));
        assert!((k - 1.0).abs() < 1e-12);
        let k = three_point_curvature((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0));
        assert!((k + 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        let a = DenseMatrix::identity(3, 3);
        let y = Vector::from_element(3, 1.0);
        let l = DenseMatrix::identity(3, 3);
        let path = TikhonovPath::General {
            a: &a,
            y: &y,
            l: &l,
        };
        assert!(lcurve(&path, &[1.0, 2.0, 3.0]).is_err());
        assert!(lcurve(&path, &[1.0, 2.0, 2.0, 3.0, 4.0]).is_err());
    }
}
