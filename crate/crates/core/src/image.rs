use alloc::vec::Vec;

use crate::error::{check_dim, domain, Result};
use crate::linalg::{check_finite, Vector};

/// Row-major grayscale image. Intensities are nominally in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ImageGrid {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(height * width, data.len())?;
        check_finite(&data)?;
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            data: alloc::vec![0.0; height * width],
        }
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Self {
        Self {
            height,
            width,
            data: alloc::vec![value; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for i in 0..height {
            for j in 0..width {
                data.push(f(i, j));
            }
        }
        Self {
            height,
            width,
            data,
        }
    }

    /// Builds a grid from nested rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(height * width);
        for r in rows {
            let r = r.as_ref();
            if r.len() != width {
                return Err(domain("ragged rows"));
            }
            data.extend_from_slice(r);
        }
        Self::new(height, width, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.width + j] = v;
    }

    /// Column-concatenated vector: pixel `(i, j)` goes to index `j·h + i`.
    pub fn vectorize(&self) -> Vector {
        let (h, w) = (self.height, self.width);
        Vector::from_fn(h * w, |k, _| self.data[(k % h) * w + k / h])
    }

    pub fn devectorize(height: usize, width: usize, v: &Vector) -> Result<Self> {
        check_dim(height * width, v.len())?;
        Ok(Self::from_fn(height, width, |i, j| v[j * height + i]))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        self.height == other.height && self.width == other.width
    }

    /// Values clamped into `[0, 1]`.
    pub fn clamped(&self) -> Self {
        self.map(|v| v.clamp(0.0, 1.0))
    }
}
