//! Regularization matrices.
//!
//! One-dimensional difference matrices use unit grid spacing. The second
//! difference rows are `[1, −2, 1]`; flipping the sign leaves every penalty
//! `‖Lx‖` unchanged.

use crate::error::{check_dim, domain, Error, Result};
use crate::image::ImageGrid;
use crate::linalg::{svd, vstack, DenseMatrix, Vector, RANK_TOL};
use crate::operators::{BoundaryCondition, Conv2d, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LKind {
    Identity,
    /// `(n−1) × n`, rows `[1, −1]`.
    D1,
    /// `n × n` lower bidiagonal: first row `[1, 0, …]`, then rows `[1, −1]`.
    D1Invertible,
    /// `(n−2) × n`, rows `[1, −2, 1]`.
    D2,
    /// `n × n` with first row `[−1, 1, …]` and last row `[…, −1, 1]`.
    D2Reflexive,
}

impl core::str::FromStr for LKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "I" | "i" => Ok(Self::Identity),
            "d1" => Ok(Self::D1),
            "d1_invertible" | "d1-invertible" => Ok(Self::D1Invertible),
            "d2" => Ok(Self::D2),
            "d2_reflexive" | "d2-reflexive" => Ok(Self::D2Reflexive),
            _ => Err(domain("unknown regularization matrix kind")),
        }
    }
}

pub fn build_l(kind: LKind, n: usize) -> Result<DenseMatrix> {
    let min = match kind {
        LKind::Identity => 1,
        LKind::D1 | LKind::D1Invertible => 2,
        LKind::D2 | LKind::D2Reflexive => 3,
    };
    if n < min {
        return Err(domain("dimension too small for this regularization matrix"));
    }
    Ok(match kind {
        LKind::Identity => DenseMatrix::identity(n, n),
        LKind::D1 => DenseMatrix::from_fn(n - 1, n, |i, j| {
            if j == i {
                1.0
            } else if j == i + 1 {
                -1.0
            } else {
                0.0
            }
        }),
        LKind::D1Invertible => DenseMatrix::from_fn(n, n, |i, j| {
            if i == 0 {
                if j == 0 {
                    1.0
                } else {
                    0.0
                }
            } else if j + 1 == i {
                1.0
            } else if j == i {
                -1.0
            } else {
                0.0
            }
        }),
        LKind::D2 => DenseMatrix::from_fn(n - 2, n, |i, j| match j.wrapping_sub(i) {
            0 | 2 => 1.0,
            1 => -2.0,
            _ => 0.0,
        }),
        LKind::D2Reflexive => {
            let mut m = DenseMatrix::zeros(n, n);
            m[(0, 0)] = -1.0;
            m[(0, 1)] = 1.0;
            for i in 1..n - 1 {
                m[(i, i - 1)] = 1.0;
                m[(i, i)] = -2.0;
                m[(i, i + 1)] = 1.0;
            }
            m[(n - 1, n - 2)] = -1.0;
            m[(n - 1, n - 1)] = 1.0;
            m
        }
    })
}

/// The five-point Laplacian `[[0,1,0],[1,−4,1],[0,1,0]]` as a convolution.
pub fn laplacian_kernel() -> ImageGrid {
    ImageGrid::from_rows(&[[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])
        .expect("static kernel")
}

pub fn laplacian2d_operator(height: usize, width: usize, bc: BoundaryCondition) -> Result<Conv2d> {
    if height < 3 || width < 3 {
        return Err(domain("laplacian needs at least a 3x3 grid"));
    }
    Conv2d::new(&laplacian_kernel(), height, width, bc)
}

/// Forward-difference gradient of a column-stacked image. The output holds
/// the vertical differences of every pixel followed by the horizontal ones,
/// with zero differences across the last row/column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gradient2d {
    height: usize,
    width: usize,
}

impl Gradient2d {
    pub fn new(height: usize, width: usize) -> Self {
        Self { height, width }
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }
}

impl LinearOperator for Gradient2d {
    fn out_dim(&self) -> usize {
        2 * self.pixels()
    }
    fn in_dim(&self) -> usize {
        self.pixels()
    }

    fn apply(&self, x: &Vector) -> Vector {
        let (h, w, n) = (self.height, self.width, self.pixels());
        let mut out = Vector::zeros(2 * n);
        for j in 0..w {
            for i in 0..h {
                let k = j * h + i;
                if i + 1 < h {
                    out[k] = x[k + 1] - x[k];
                }
                if j + 1 < w {
                    out[n + k] = x[k + h] - x[k];
                }
            }
        }
        out
    }

    fn apply_adjoint(&self, y: &Vector) -> Vector {
        let (h, w, n) = (self.height, self.width, self.pixels());
        let mut out = Vector::zeros(n);
        for j in 0..w {
            for i in 0..h {
                let k = j * h + i;
                if i + 1 < h {
                    out[k + 1] += y[k];
                    out[k] -= y[k];
                }
                if j + 1 < w {
                    out[k + h] += y[n + k];
                    out[k] -= y[n + k];
                }
            }
        }
        out
    }
}

/// Penalty term `λ²‖L(x − x*)‖²` of a Tikhonov functional.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizerSpec<L = DenseMatrix> {
    pub l: L,
    pub x_ref: Vector,
    pub lambda: f64,
}

impl<L: LinearOperator> RegularizerSpec<L> {
    /// Zero reference value.
    pub fn new(l: L, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(domain("lambda must be finite and non-negative"));
        }
        let n = l.in_dim();
        Ok(Self {
            l,
            x_ref: Vector::zeros(n),
            lambda,
        })
    }

    pub fn with_reference(mut self, x_ref: Vector) -> Result<Self> {
        check_dim(self.l.in_dim(), x_ref.len())?;
        self.x_ref = x_ref;
        Ok(self)
    }
}

impl RegularizerSpec<DenseMatrix> {
    pub fn identity(n: usize, lambda: f64) -> Result<Self> {
        Self::new(DenseMatrix::identity(n, n), lambda)
    }
}

/// Whether `[A; L]` has full column rank, i.e. the null spaces of `A` and
/// `L` intersect only at zero.
pub fn stacked_full_column_rank(a: &DenseMatrix, l: &DenseMatrix) -> Result<bool> {
    check_dim(a.ncols(), l.ncols())?;
    let f = svd(&vstack(&[a, l]))?;
    Ok(f.rank(RANK_TOL) == a.ncols())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_difference_matrices() {
        let d1 = build_l(LKind::D1, 3).unwrap();
        assert_eq!(
            d1,
            DenseMatrix::from_row_slice(2, 3, &[1.0, -1.0, 0.0, 0.0, 1.0, -1.0])
        );
        let d2 = build_l(LKind::D2, 4).unwrap();
        assert_eq!(
            d2,
            DenseMatrix::from_row_slice(2, 4, &[1.0, -2.0, 1.0, 0.0, 0.0, 1.0, -2.0, 1.0])
        );
        let d1i = build_l(LKind::D1Invertible, 3).unwrap();
        assert_eq!(
            d1i,
            DenseMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 1.0, -1.0])
        );
        let d2r = build_l(LKind::D2Reflexive, 4).unwrap();
        assert_eq!(
            d2r,
            DenseMatrix::from_row_slice(
                4,
                4,
                &[
                    -1.0, 1.0, 0.0, 0.0, 1.0, -2.0, 1.0, 0.0, 0.0, 1.0, -2.0, 1.0, 0.0, 0.0, -1.0,
                    1.0
                ]
            )
        );
        assert!(build_l(LKind::D2, 2).is_err());
    }

    #[test]
    fn gradient_adjoint_small() {
        let g = Gradient2d::new(3, 4);
        let d = crate::operators::materialize(&g).unwrap();
        let y = Vector::from_fn(24, |i, _| (i as f64 * 0.37).sin());
        let lhs = g.apply_adjoint(&y);
        let rhs = d.tr_mul(&y);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
