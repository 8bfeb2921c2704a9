//! Frequency-domain deconvolution for periodic convolution models.
//!
//! The 2D DFT is unnormalized in the forward direction and scaled by
//! `1/(h·w)` on the way back, so `‖F(x)‖ = √(h·w)·‖x‖`. The regularization
//! constant `λ²` is added to `|F(H)|²` on that scale. Kernels are circularly
//! shifted so their centre tap sits at index `(0, 0)` before transforming.
//!
//! The transform is a separable direct DFT with precomputed twiddles, which
//! is exact for any size and cheap at desk scale.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::Complex;
#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::image::ImageGrid;

type C64 = Complex<f64>;

fn twiddles(n: usize, inverse: bool) -> Vec<C64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|k| {
            let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
            C64::new(c, sign * s)
        })
        .collect()
}

fn dft_lines(data: &mut [C64], n: usize, count: usize, stride: usize, step: usize, tw: &[C64]) {
    let mut buf = alloc::vec![C64::new(0.0, 0.0); n];
    for line in 0..count {
        let base = line * stride;
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..n {
                acc += data[base + t * step] * tw[(k * t) % n];
            }
            *out = acc;
        }
        for (t, v) in buf.iter().enumerate() {
            data[base + t * step] = *v;
        }
    }
}

/// In-place 2D DFT of a row-major `h × w` array.
fn dft2_inplace(data: &mut [C64], h: usize, w: usize, inverse: bool) {
    dft_lines(data, w, h, w, 1, &twiddles(w, inverse));
    dft_lines(data, h, w, 1, w, &twiddles(h, inverse));
    if inverse {
        let s = 1.0 / (h * w) as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

/// Unnormalized forward DFT, row-major.
pub fn dft2(x: &ImageGrid) -> Vec<C64> {
    let mut d: Vec<C64> = x.data().iter().map(|&v| C64::new(v, 0.0)).collect();
    dft2_inplace(&mut d, x.height(), x.width(), false);
    d
}

/// Inverse DFT with `1/(h·w)` scaling.
pub fn idft2(spec: &[C64], h: usize, w: usize) -> Vec<C64> {
    let mut d = spec.to_vec();
    dft2_inplace(&mut d, h, w, true);
    d
}

/// Transfer function of a centred kernel on an `h × w` periodic grid.
pub fn otf(kernel: &ImageGrid, h: usize, w: usize) -> Result<Vec<C64>> {
    if kernel.height() > h || kernel.width() > w {
        return Err(domain("kernel larger than image"));
    }
    let (ch, cw) = (kernel.height() / 2, kernel.width() / 2);
    let mut pad = ImageGrid::zeros(h, w);
    for a in 0..kernel.height() {
        for b in 0..kernel.width() {
            let i = (a + h - ch) % h;
            let j = (b + w - cw) % w;
            pad.set(i, j, pad.get(i, j) + kernel.get(a, b));
        }
    }
    Ok(dft2(&pad))
}

/// `X̂ = F⁻¹[conj(F(H))·F(Y) / (|F(H)|² + c)]`.
fn filtered_inverse(y: &ImageGrid, kernel: &ImageGrid, c: f64) -> Result<ImageGrid> {
    let (h, w) = (y.height(), y.width());
    let hk = otf(kernel, h, w)?;
    let mut fy = dft2(y);
    for (v, hv) in fy.iter_mut().zip(&hk) {
        let den = hv.norm_sqr() + c;
        if den == 0.0 {
            return Err(Error::Singular);
        }
        *v = hv.conj() * *v / den;
    }
    let x = idft2(&fy, h, w);
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.re.abs())).max(1.0);
    let imag = x.iter().fold(0.0_f64, |m, v| m.max(v.im.abs()));
    if imag > 1e-8 * scale {
        return Err(Error::Solver(alloc::format!(
            "imaginary residue {imag} after inverse transform"
        )));
    }
    ImageGrid::new(h, w, x.iter().map(|v| v.re).collect())
}

/// Tikhonov deconvolution in the frequency domain, `c = λ²`.
pub fn fft_tikhonov(y: &ImageGrid, kernel: &ImageGrid, lambda: f64) -> Result<ImageGrid> {
    if !(lambda > 0.0) {
        return Err(domain("lambda must be positive"));
    }
    filtered_inverse(y, kernel, lambda * lambda)
}

/// Wiener filter with a flat noise-to-signal ratio, `c = nsr`.
pub fn wiener_nsr(y: &ImageGrid, kernel: &ImageGrid, nsr: f64) -> Result<ImageGrid> {
    if !(nsr >= 0.0) {
        return Err(domain("nsr must be non-negative"));
    }
    filtered_inverse(y, kernel, nsr)
}

/// Spectral energy at radial frequencies in the top quarter of the range.
pub fn high_frequency_energy(x: &ImageGrid) -> f64 {
    let (h, w) = (x.height(), x.width());
    let f = dft2(x);
    let radius = |i: usize, j: usize| {
        let fi = i.min(h - i) as f64 / h as f64;
        let fj = j.min(w - j) as f64 / w as f64;
        (fi * fi + fj * fj).sqrt()
    };
    let rmax = radius(h / 2, w / 2);
    let mut e = 0.0;
    for i in 0..h {
        for j in 0..w {
            if radius(i, j) >= 0.75 * rmax {
                e += f[i * w + j].norm_sqr();
            }
        }
    }
    e
}
