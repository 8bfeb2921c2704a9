//! Forward operators: PSFs, 2D convolution, downsampling, masking and noise.

mod conv;
mod noise;
mod psf;

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

pub use conv::{conv2d, conv_matrix, Conv2d, DENSE_GUARD};
pub use noise::{add_noise, gaussian_matrix, gaussian_vector, NoiseModel};
pub use psf::{psf_build, Psf, PsfKind, PsfParams};

use crate::error::{check_dim, domain, Error, Result};
use crate::image::ImageGrid;
use crate::linalg::{DenseMatrix, Vector};

/// How reads outside the image are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Zero,
    Replicate,
    Periodic,
    /// Mirror about the border, repeating the edge sample.
    Reflexive,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 4] =
        [Self::Zero, Self::Replicate, Self::Periodic, Self::Reflexive];

    /// Maps a possibly out-of-range index onto `0..n`, or `None` for a zero read.
    #[inline]
    pub fn resolve(self, k: isize, n: usize) -> Option<usize> {
        let n_i = n as isize;
        if (0..n_i).contains(&k) {
            return Some(k as usize);
        }
        match self {
            Self::Zero => None,
            Self::Replicate => Some(k.clamp(0, n_i - 1) as usize),
            Self::Periodic => Some(k.rem_euclid(n_i) as usize),
            Self::Reflexive => {
                let period = 2 * n_i;
                let m = k.rem_euclid(period);
                Some(if m < n_i { m } else { period - 1 - m } as usize)
            }
        }
    }
}

impl core::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Self::Zero),
            "replicate" => Ok(Self::Replicate),
            "periodic" => Ok(Self::Periodic),
            "reflexive" => Ok(Self::Reflexive),
            _ => Err(domain("unknown boundary condition")),
        }
    }
}

/// A linear map `ℝⁿ → ℝᵐ` with its adjoint.
pub trait LinearOperator {
    /// `m`
    fn out_dim(&self) -> usize;
    /// `n`
    fn in_dim(&self) -> usize;
    fn apply(&self, x: &Vector) -> Vector;
    fn apply_adjoint(&self, y: &Vector) -> Vector;

    /// Dense matrix, when the operator already stores one.
    fn as_dense(&self) -> Option<&DenseMatrix> {
        None
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn out_dim(&self) -> usize {
        (**self).out_dim()
    }
    fn in_dim(&self) -> usize {
        (**self).in_dim()
    }
    fn apply(&self, x: &Vector) -> Vector {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: &Vector) -> Vector {
        (**self).apply_adjoint(y)
    }
    fn as_dense(&self) -> Option<&DenseMatrix> {
        (**self).as_dense()
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for alloc::boxed::Box<T> {
    fn out_dim(&self) -> usize {
        (**self).out_dim()
    }
    fn in_dim(&self) -> usize {
        (**self).in_dim()
    }
    fn apply(&self, x: &Vector) -> Vector {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: &Vector) -> Vector {
        (**self).apply_adjoint(y)
    }
    fn as_dense(&self) -> Option<&DenseMatrix> {
        (**self).as_dense()
    }
}

impl LinearOperator for DenseMatrix {
    fn out_dim(&self) -> usize {
        self.nrows()
    }
    fn in_dim(&self) -> usize {
        self.ncols()
    }
    fn apply(&self, x: &Vector) -> Vector {
        self * x
    }
    fn apply_adjoint(&self, y: &Vector) -> Vector {
        self.tr_mul(y)
    }
    fn as_dense(&self) -> Option<&DenseMatrix> {
        Some(self)
    }
}

/// Builds the dense matrix of any operator column by column.
pub fn materialize<A: LinearOperator + ?Sized>(op: &A) -> Result<DenseMatrix> {
    if let Some(d) = op.as_dense() {
        return Ok(d.clone());
    }
    let n = op.in_dim();
    if n > DENSE_GUARD {
        return Err(Error::SizeGuard {
            size: n,
            limit: DENSE_GUARD,
        });
    }
    let mut out = DenseMatrix::zeros(op.out_dim(), n);
    let mut e = Vector::zeros(n);
    for j in 0..n {
        e[j] = 1.0;
        out.set_column(j, &op.apply(&e));
        e[j] = 0.0;
    }
    Ok(out)
}

/// Largest singular value estimate by power iteration on `AᵀA`.
pub fn spectral_norm_estimate<A: LinearOperator + ?Sized>(op: &A, iters: usize) -> f64 {
    let n = op.in_dim();
    if n == 0 {
        return 0.0;
    }
    // deterministic start with no symmetry that could hide the top vector
    let mut v = Vector::from_fn(n, |i, _| 1.0 + ((i * 7919) % 13) as f64 / 13.0);
    v /= v.norm();
    let mut est = 0.0;
    for _ in 0..iters.max(1) {
        let w = op.apply_adjoint(&op.apply(&v));
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        est = nw;
        v = w / nw;
    }
    est.sqrt()
}

/// `y = Ax` restricted to a subset of indices, i.e. a 0/1 diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    keep: Vec<bool>,
}

impl Mask {
    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_diagonal(&Vector::from_iterator(
            self.keep.len(),
            self.keep.iter().map(|&k| if k { 1.0 } else { 0.0 }),
        ))
    }
}

pub fn mask_operator(keep_indices: &[usize], n: usize) -> Result<Mask> {
    let mut keep = alloc::vec![false; n];
    for &i in keep_indices {
        if i >= n {
            return Err(domain("mask index out of range"));
        }
        keep[i] = true;
    }
    Ok(Mask { keep })
}

impl LinearOperator for Mask {
    fn out_dim(&self) -> usize {
        self.keep.len()
    }
    fn in_dim(&self) -> usize {
        self.keep.len()
    }
    fn apply(&self, x: &Vector) -> Vector {
        Vector::from_iterator(
            x.len(),
            x.iter()
                .zip(&self.keep)
                .map(|(v, &k)| if k { *v } else { 0.0 }),
        )
    }
    fn apply_adjoint(&self, y: &Vector) -> Vector {
        self.apply(y)
    }
}

/// `(n/2) × n` pairwise averaging matrix.
pub fn downsample_matrix(n: usize) -> Result<DenseMatrix> {
    if n == 0 || n % 2 != 0 {
        return Err(domain("downsampling needs an even, positive length"));
    }
    let mut m = DenseMatrix::zeros(n / 2, n);
    for k in 0..n / 2 {
        m[(k, 2 * k)] = 0.5;
        m[(k, 2 * k + 1)] = 0.5;
    }
    Ok(m)
}

/// `A_sub Y A_subᵀ`: 2 × 2 block averaging of an image with even sides.
pub fn downsample2d(y: &ImageGrid) -> Result<ImageGrid> {
    let rows = downsample_matrix(y.height())?;
    let cols = downsample_matrix(y.width())?;
    let ym = DenseMatrix::from_row_slice(y.height(), y.width(), y.data());
    let out = rows * ym * cols.transpose();
    Ok(ImageGrid::from_fn(out.nrows(), out.ncols(), |i, j| {
        out[(i, j)]
    }))
}

/// Matrix-free form of [`downsample2d`] on column-stacked images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Downsample2d {
    height: usize,
    width: usize,
}

impl Downsample2d {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 || height % 2 != 0 || width % 2 != 0 {
            return Err(domain("downsampling needs even, positive sides"));
        }
        Ok(Self { height, width })
    }
}

impl LinearOperator for Downsample2d {
    fn out_dim(&self) -> usize {
        self.height * self.width / 4
    }
    fn in_dim(&self) -> usize {
        self.height * self.width
    }
    fn apply(&self, x: &Vector) -> Vector {
        let h = self.height;
        let hh = h / 2;
        Vector::from_fn(self.out_dim(), |k, _| {
            let (i, j) = (k % hh, k / hh);
            let at = |r: usize, c: usize| x[c * h + r];
            0.25 * (at(2 * i, 2 * j)
                + at(2 * i + 1, 2 * j)
                + at(2 * i, 2 * j + 1)
                + at(2 * i + 1, 2 * j + 1))
        })
    }
    fn apply_adjoint(&self, y: &Vector) -> Vector {
        let (h, hh) = (self.height, self.height / 2);
        Vector::from_fn(self.in_dim(), |k, _| {
            let (i, j) = (k % h, k / h);
            0.25 * y[(j / 2) * hh + i / 2]
        })
    }
}

/// `A ∘ B`.
#[derive(Debug, Clone)]
pub struct Composed<A, B> {
    outer: A,
    inner: B,
}

impl<A: LinearOperator, B: LinearOperator> Composed<A, B> {
    pub fn new(outer: A, inner: B) -> Result<Self> {
        check_dim(outer.in_dim(), inner.out_dim())?;
        Ok(Self { outer, inner })
    }
}

impl<A: LinearOperator, B: LinearOperator> LinearOperator for Composed<A, B> {
    fn out_dim(&self) -> usize {
        self.outer.out_dim()
    }
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn apply(&self, x: &Vector) -> Vector {
        self.outer.apply(&self.inner.apply(x))
    }
    fn apply_adjoint(&self, y: &Vector) -> Vector {
        self.inner.apply_adjoint(&self.outer.apply_adjoint(y))
    }
}

/// The identity on `ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn out_dim(&self) -> usize {
        self.0
    }
    fn in_dim(&self) -> usize {
        self.0
    }
    fn apply(&self, x: &Vector) -> Vector {
        x.clone()
    }
    fn apply_adjoint(&self, y: &Vector) -> Vector {
        y.clone()
    }
}

/// Worst relative adjoint mismatch `|⟨Ax, y⟩ − ⟨x, Aᵀy⟩| / (‖Ax‖‖y‖)`
/// over `probes` seeded random pairs.
pub fn adjoint_mismatch<A: LinearOperator + ?Sized>(op: &A, probes: usize, seed: u64) -> f64 {
    let mut worst = 0.0_f64;
    for p in 0..probes as u64 {
        let x = gaussian_vector(op.in_dim(), seed.wrapping_add(2 * p));
        let y = gaussian_vector(op.out_dim(), seed.wrapping_add(2 * p + 1));
        let lhs = op.apply(&x).dot(&y);
        let rhs = x.dot(&op.apply_adjoint(&y));
        let scale = (op.apply(&x).norm() * y.norm()).max(x.norm() * op.apply_adjoint(&y).norm());
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    worst
}
