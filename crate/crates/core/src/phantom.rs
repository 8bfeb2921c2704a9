//! Deterministic test signals and images.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::image::ImageGrid;
use crate::linalg::Vector;
use crate::operators::LinearOperator;
use crate::sparse::dct2_dictionary;

/// Piecewise-constant image in `[0, 1]`: background, two rectangles and a
/// disk, scaled to the grid size.
pub fn blocks(h: usize, w: usize) -> ImageGrid {
    let (hf, wf) = (h as f64, w as f64);
    ImageGrid::from_fn(h, w, |i, j| {
        let (u, v) = ((i as f64 + 0.5) / hf, (j as f64 + 0.5) / wf);
        let mut val = 0.1;
        if (0.15..0.45).contains(&u) && (0.1..0.55).contains(&v) {
            val = 0.8;
        }
        if (0.55..0.85).contains(&u) && (0.2..0.4).contains(&v) {
            val = 0.5;
        }
        let (du, dv) = (u - 0.65, v - 0.7);
        if du * du + dv * dv < 0.04 {
            val = 1.0;
        }
        val
    })
}

/// Image whose 2D DCT has exactly `k` nonzero coefficients, all in the
/// low-frequency corner, with seeded Gaussian amplitudes plus a DC offset.
/// Returns the image and its coefficient vector.
pub fn dct_sparse(h: usize, w: usize, k: usize, seed: u64) -> (ImageGrid, Vector) {
    let dict = dct2_dictionary(h.max(2), w.max(2)).expect("size at least 2");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    // walk anti-diagonals of the coefficient array (column-major index j·h + i)
    let mut order: Vec<(usize, usize)> = Vec::new();
    'outer: for d in 0..(h + w) {
        for i in 0..=d {
            let j = d - i;
            if i < h && j < w {
                order.push((i, j));
                if order.len() == k.min(h * w) {
                    break 'outer;
                }
            }
        }
    }
    let mut s = Vector::zeros(h * w);
    for (n, &(i, j)) in order.iter().enumerate() {
        let amp: f64 = StandardNormal.sample(&mut rng);
        s[j * h + i] = if n == 0 {
            0.5 * ((h * w) as f64).sqrt()
        } else {
            amp
        };
    }
    let x = dict.apply(&s);
    (
        ImageGrid::devectorize(h, w, &x).expect("matching length"),
        s,
    )
}

/// Unit step of length `n` jumping from 0 to `height` at `n / 2`.
pub fn step(n: usize, height: f64) -> Vector {
    Vector::from_fn(n, |i, _| if i >= n / 2 { height } else { 0.0 })
}
