use alloc::vec::Vec;

use super::{BoundaryCondition, LinearOperator};
use crate::error::{check_dim, domain, Error, Result};
use crate::image::ImageGrid;
use crate::linalg::{DenseMatrix, Vector};

/// Largest column count allowed for dense operator materialization.
pub const DENSE_GUARD: usize = 16384;

/// Source index of every (output index, kernel tap) pair along one axis:
/// `table[i * k + a]` is where output `i` reads through tap `a`.
fn index_table(n: usize, k: usize, bc: BoundaryCondition) -> Vec<Option<usize>> {
    let c = (k / 2) as isize;
    let mut t = Vec::with_capacity(n * k);
    for i in 0..n as isize {
        for a in 0..k as isize {
            t.push(bc.resolve(i + c - a, n));
        }
    }
    t
}

fn check_kernel(x_h: usize, x_w: usize, h: &ImageGrid) -> Result<()> {
    if h.height() % 2 == 0 || h.width() % 2 == 0 {
        return Err(domain("kernel sides must be odd"));
    }
    if h.height() > x_h || h.width() > x_w {
        return Err(domain("kernel larger than image"));
    }
    Ok(())
}

/// `Y(i,j) = Σ H(a,b) X(i − a + c, j − b + c)` with the kernel centred on
/// its middle tap and out-of-range reads resolved by `bc`.
///
/// The kernel need not be normalized.
pub fn conv2d(x: &ImageGrid, h: &ImageGrid, bc: BoundaryCondition) -> Result<ImageGrid> {
    check_kernel(x.height(), x.width(), h)?;
    let (kh, kw) = (h.height(), h.width());
    let rows = index_table(x.height(), kh, bc);
    let cols = index_table(x.width(), kw, bc);
    let mut out = ImageGrid::zeros(x.height(), x.width());
    for i in 0..x.height() {
        for j in 0..x.width() {
            let mut acc = 0.0;
            for a in 0..kh {
                let Some(si) = rows[i * kh + a] else { continue };
                for b in 0..kw {
                    if let Some(sj) = cols[j * kw + b] {
                        acc += h.get(a, b) * x.get(si, sj);
                    }
                }
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Dense matrix `M` with `M · vec(X) = vec(conv2d(X, H, bc))`.
pub fn conv_matrix(
    h: &ImageGrid,
    height: usize,
    width: usize,
    bc: BoundaryCondition,
) -> Result<DenseMatrix> {
    let n = height * width;
    if n > DENSE_GUARD {
        return Err(Error::SizeGuard {
            size: n,
            limit: DENSE_GUARD,
        });
    }
    check_kernel(height, width, h)?;
    let (kh, kw) = (h.height(), h.width());
    let rows = index_table(height, kh, bc);
    let cols = index_table(width, kw, bc);
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..height {
        for j in 0..width {
            let r = j * height + i;
            for a in 0..kh {
                let Some(si) = rows[i * kh + a] else { continue };
                for b in 0..kw {
                    if let Some(sj) = cols[j * kw + b] {
                        m[(r, sj * height + si)] += h.get(a, b);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Matrix-free convolution operator on column-stacked images.
#[derive(Debug, Clone)]
pub struct Conv2d {
    kernel: ImageGrid,
    height: usize,
    width: usize,
    bc: BoundaryCondition,
    rows: Vec<Option<usize>>,
    cols: Vec<Option<usize>>,
}

impl Conv2d {
    pub fn new(
        kernel: &ImageGrid,
        height: usize,
        width: usize,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        check_kernel(height, width, kernel)?;
        Ok(Self {
            rows: index_table(height, kernel.height(), bc),
            cols: index_table(width, kernel.width(), bc),
            kernel: kernel.clone(),
            height,
            width,
            bc,
        })
    }

    pub fn kernel(&self) -> &ImageGrid {
        &self.kernel
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        conv_matrix(&self.kernel, self.height, self.width, self.bc)
    }
}

impl LinearOperator for Conv2d {
    fn out_dim(&self) -> usize {
        self.height * self.width
    }
    fn in_dim(&self) -> usize {
        self.height * self.width
    }

    fn apply(&self, x: &Vector) -> Vector {
        let (h, w) = (self.height, self.width);
        let (kh, kw) = (self.kernel.height(), self.kernel.width());
        let mut out = Vector::zeros(h * w);
        for j in 0..w {
            for i in 0..h {
                let mut acc = 0.0;
                for a in 0..kh {
                    let Some(si) = self.rows[i * kh + a] else {
                        continue;
                    };
                    for b in 0..kw {
                        if let Some(sj) = self.cols[j * kw + b] {
                            acc += self.kernel.get(a, b) * x[sj * h + si];
                        }
                    }
                }
                out[j * h + i] = acc;
            }
        }
        out
    }

    fn apply_adjoint(&self, y: &Vector) -> Vector {
        let (h, w) = (self.height, self.width);
        let (kh, kw) = (self.kernel.height(), self.kernel.width());
        let mut out = Vector::zeros(h * w);
        for j in 0..w {
            for i in 0..h {
                let v = y[j * h + i];
                if v == 0.0 {
                    continue;
                }
                for a in 0..kh {
                    let Some(si) = self.rows[i * kh + a] else {
                        continue;
                    };
                    for b in 0..kw {
                        if let Some(sj) = self.cols[j * kw + b] {
                            out[sj * h + si] += self.kernel.get(a, b) * v;
                        }
                    }
                }
            }
        }
        out
    }
}

impl Conv2d {
    /// Applies the operator to an image directly.
    pub fn apply_image(&self, x: &ImageGrid) -> Result<ImageGrid> {
        if x.height() != self.height || x.width() != self.width {
            check_dim(self.height * self.width, x.len())?;
            return Err(domain("image shape does not match operator"));
        }
        ImageGrid::devectorize(self.height, self.width, &self.apply(&x.vectorize()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure_image() -> ImageGrid {
        ImageGrid::from_rows(&[[1.0, 1.0, 0.0], [1.0, 2.0, 1.0], [1.0, 0.0, 0.0]]).unwrap()
    }

    #[test]
    fn rotated_figure_kernel() {
        // true convolution with the 180° rotation of the displayed correlation mask
        let h = ImageGrid::from_rows(&[[2.0, 0.0, 1.0], [0.0, 5.0, 0.0], [4.0, 0.0, 3.0]]).unwrap();
        let y = conv2d(&figure_image(), &h, BoundaryCondition::Zero).unwrap();
        assert_eq!(y.get(1, 1), 14.0);
        assert_eq!(y.get(0, 2), 2.0);
    }

    #[test]
    fn delta_kernel_is_identity() {
        let h = ImageGrid::from_rows(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        for bc in BoundaryCondition::ALL {
            assert_eq!(conv2d(&figure_image(), &h, bc).unwrap(), figure_image());
        }
    }

    #[test]
    fn oversized_kernel_rejected() {
        let h = ImageGrid::constant(5, 5, 0.04);
        assert!(conv2d(&figure_image(), &h, BoundaryCondition::Zero).is_err());
    }
}
