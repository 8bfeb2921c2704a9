//! Seeded noise. All randomness in the crate goes through ChaCha20
//! (`rand_chacha::ChaCha20Rng::seed_from_u64`), so streams are reproducible
//! for a given seed on every platform.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};

use crate::error::{domain, Result};
use crate::linalg::{DenseMatrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// Additive i.i.d. `N(mean, std²)`.
    Gaussian { mean: f64, std: f64 },
    /// `yᵢ ← Poisson(scale · max(yᵢ, 0)) / scale`.
    Poisson { scale: f64 },
}

pub fn add_noise(y: &Vector, model: NoiseModel, seed: u64) -> Result<Vector> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    match model {
        NoiseModel::Gaussian { mean, std } => {
            if !(std >= 0.0) || !mean.is_finite() || !std.is_finite() {
                return Err(domain("gaussian noise needs finite mean and std >= 0"));
            }
            if std == 0.0 {
                return Ok(y.add_scalar(mean));
            }
            let d = Normal::new(mean, std).map_err(|_| domain("invalid normal parameters"))?;
            Ok(y.map(|v| v + d.sample(&mut rng)))
        }
        NoiseModel::Poisson { scale } => {
            if !(scale > 0.0) || !scale.is_finite() {
                return Err(domain("poisson scale must be positive"));
            }
            let mut out = y.clone();
            for v in out.iter_mut() {
                let rate = scale * v.max(0.0);
                *v = if rate > 0.0 {
                    let d = Poisson::new(rate).map_err(|_| domain("poisson rate out of range"))?;
                    d.sample(&mut rng) / scale
                } else {
                    0.0
                };
            }
            Ok(out)
        }
    }
}

/// `n` i.i.d. standard normal draws.
pub fn gaussian_vector(n: usize, seed: u64) -> Vector {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Vector::from_fn(n, |_, _| StandardNormal.sample(&mut rng))
}

/// `m × n` matrix of i.i.d. `N(0, std²)` entries, drawn row by row.
pub fn gaussian_matrix(m: usize, n: usize, std: f64, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut a = DenseMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            a[(i, j)] = std * z;
        }
    }
    a
}
