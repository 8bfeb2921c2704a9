//! Seeded desk-scale experiments shared by the CLI and the test suites.

use std::f64::consts::PI;

use anyhow::{bail, Result};
use illposed_core::direct::tikhonov_general;
use illposed_core::linalg::{mse, DenseMatrix, Vector};
use illposed_core::operators::{add_noise, conv_matrix, gaussian_vector, Conv2d, NoiseModel};
use illposed_core::phantom::blocks;
use illposed_core::regmat::{build_l, LKind};
use illposed_core::regression::{build_design, ols, Basis};
use illposed_core::sparse::{dct_dictionary, top_k_support};
use illposed_core::{BoundaryCondition, ImageGrid, LinearOperator, Psf, RegularizerSpec};

use crate::specs::PsfSpec;

pub const DESK_SEED: u64 = 7;

/// Forward model and data for a deblurring run.
#[derive(Debug, Clone, PartialEq)]
pub struct DeblurSetup {
    pub size: usize,
    pub psf: PsfSpec,
    pub bc: BoundaryCondition,
    pub noise: Option<NoiseModel>,
    pub seed: u64,
}

impl Default for DeblurSetup {
    /// 32×32 blocks phantom, 9×9 Gaussian PSF with σ = 1.5, reflexive
    /// boundaries and white noise of standard deviation 3e-4.
    fn default() -> Self {
        Self {
            size: 32,
            psf: "gaussian:9:1.5".parse().expect("valid literal"),
            bc: BoundaryCondition::Reflexive,
            noise: Some(NoiseModel::Gaussian {
                mean: 0.0,
                std: 3e-4,
            }),
            seed: DESK_SEED,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeblurInstance {
    pub truth: ImageGrid,
    pub psf: Psf,
    pub op: Conv2d,
    pub y_clean: Vector,
    pub y: Vector,
    /// `‖y − y_clean‖`.
    pub noise_norm: f64,
}

impl DeblurInstance {
    pub fn shape(&self) -> (usize, usize) {
        (self.truth.height(), self.truth.width())
    }

    pub fn dense(&self) -> Result<DenseMatrix> {
        Ok(self.op.to_dense()?)
    }

    pub fn observed(&self) -> ImageGrid {
        let (h, w) = self.shape();
        ImageGrid::devectorize(h, w, &self.y).expect("consistent shape")
    }
}

/// Blurs `truth` (default: the blocks phantom) and adds seeded noise.
pub fn deblur_instance(setup: &DeblurSetup, truth: Option<ImageGrid>) -> Result<DeblurInstance> {
    let truth = truth.unwrap_or_else(|| blocks(setup.size, setup.size));
    let psf = setup.psf.build()?;
    let op = Conv2d::new(psf.kernel(), truth.height(), truth.width(), setup.bc)?;
    let y_clean = op.apply(&truth.vectorize());
    let y = match setup.noise {
        Some(model) => add_noise(&y_clean, model, setup.seed)?,
        None => y_clean.clone(),
    };
    let noise_norm = (&y - &y_clean).norm();
    Ok(DeblurInstance {
        truth,
        psf,
        op,
        y_clean,
        y,
        noise_norm,
    })
}

/// Dense matrix of the instance operator, built by scattering the kernel.
pub fn deblur_matrix(inst: &DeblurInstance) -> Result<DenseMatrix> {
    let (h, w) = inst.shape();
    Ok(conv_matrix(inst.psf.kernel(), h, w, inst.op.boundary())?)
}

/// `sin(t)` on `[0, 8π]` with samples removed over `gaps`; noise is added
/// after the removal, so removed samples carry pure noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MissingData {
    pub t: Vec<f64>,
    pub truth: Vector,
    pub observed: Vector,
    pub keep: Vec<bool>,
}

pub fn missing_data(
    n: usize,
    gaps: &[(usize, usize)],
    noise_std: f64,
    seed: u64,
) -> Result<MissingData> {
    if n < 3 {
        bail!("signal too short");
    }
    for &(a, b) in gaps {
        if a == 0 || b >= n {
            bail!("gap {a}:{b} must lie strictly inside 0..{n}");
        }
    }
    let t: Vec<f64> = (0..n)
        .map(|i| 8.0 * PI * i as f64 / (n - 1) as f64)
        .collect();
    let truth = Vector::from_iterator(n, t.iter().map(|v| v.sin()));
    let keep: Vec<bool> = (0..n)
        .map(|i| !gaps.iter().any(|&(a, b)| (a..b).contains(&i)))
        .collect();
    let mut observed = Vector::from_fn(n, |i, _| if keep[i] { truth[i] } else { 0.0 });
    if noise_std > 0.0 {
        observed = add_noise(
            &observed,
            NoiseModel::Gaussian {
                mean: 0.0,
                std: noise_std,
            },
            seed,
        )?;
    }
    Ok(MissingData {
        t,
        truth,
        observed,
        keep,
    })
}

impl MissingData {
    /// Diagonal selection matrix with zeros at the removed samples.
    pub fn mask_matrix(&self) -> DenseMatrix {
        let n = self.keep.len();
        DenseMatrix::from_fn(n, n, |i, j| if i == j && self.keep[i] { 1.0 } else { 0.0 })
    }

    /// `argmin ‖A_k x − y‖² + λ²‖Lx‖²`.
    pub fn reconstruct(&self, l: LKind, lambda: f64) -> Result<Vector> {
        let a = self.mask_matrix();
        let reg = RegularizerSpec::new(build_l(l, self.keep.len())?, lambda)?;
        Ok(tikhonov_general(&a, &self.observed, &reg)?)
    }
}

/// Polynomial and trigonometric fits of `cos(t) + cos(3t)` sampled on
/// `(π, 3π)`. The polynomial columns are evaluated on `(−1.7, 1.7)` and
/// the trigonometric ones on `(−π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpResult {
    pub t: Vec<f64>,
    pub truth: Vector,
    pub y: Vector,
    pub fit_poly: Vector,
    pub fit_trig: Vector,
    pub mse_poly: f64,
    pub mse_trig: f64,
    /// RMS of `y − fit_trig`.
    pub residual_rms_trig: f64,
    pub poly_condition: f64,
}

pub fn interp_experiment(
    nodes: usize,
    degree: usize,
    freqs: usize,
    noise_std: f64,
    seed: u64,
) -> Result<InterpResult> {
    if nodes < 2 {
        bail!("need at least two nodes");
    }
    let frac = |i: usize| (i as f64 + 0.5) / nodes as f64;
    let t: Vec<f64> = (0..nodes).map(|i| PI + 2.0 * PI * frac(i)).collect();
    let truth = Vector::from_iterator(nodes, t.iter().map(|v| v.cos() + (3.0 * v).cos()));
    let y = if noise_std > 0.0 {
        add_noise(
            &truth,
            NoiseModel::Gaussian {
                mean: 0.0,
                std: noise_std,
            },
            seed,
        )?
    } else {
        truth.clone()
    };
    let s: Vec<f64> = (0..nodes).map(|i| -1.7 + 3.4 * frac(i)).collect();
    let tc: Vec<f64> = t.iter().map(|v| v - 2.0 * PI).collect();
    let a1 = build_design(Basis::Poly { degree }, &s)?.into_inner();
    let a2 = build_design(Basis::Trig { freqs }, &tc)?.into_inner();
    let fit_poly = &a1 * ols(&a1, &y)?;
    let fit_trig = &a2 * ols(&a2, &y)?;
    let residual_rms_trig = (&y - &fit_trig).norm() / (nodes as f64).sqrt();
    Ok(InterpResult {
        mse_poly: mse(fit_poly.as_slice(), truth.as_slice()),
        mse_trig: mse(fit_trig.as_slice(), truth.as_slice()),
        poly_condition: illposed_core::linalg::condition_number(&a1, 0.0)?,
        t,
        truth,
        y,
        fit_poly,
        fit_trig,
        residual_rms_trig,
    })
}

/// `y = −2 + 2t − t⁵` on `n` nodes in `(−1.6, 1.6)` with `N(0, noise_std²)`
/// noise, together with the quartic design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuinticData {
    pub t: Vec<f64>,
    pub truth: Vector,
    pub y: Vector,
    pub design: DenseMatrix,
}

pub fn quintic_data(n: usize, noise_std: f64, seed: u64) -> Result<QuinticData> {
    if n < 5 {
        bail!("need at least five samples for a quartic fit");
    }
    let t: Vec<f64> = (0..n)
        .map(|i| -1.6 + 3.2 * (i as f64 + 0.5) / n as f64)
        .collect();
    let truth = Vector::from_iterator(n, t.iter().map(|v| -2.0 + 2.0 * v - v.powi(5)));
    let y = add_noise(
        &truth,
        NoiseModel::Gaussian {
            mean: 0.0,
            std: noise_std,
        },
        seed,
    )?;
    let design = build_design(Basis::Poly { degree: 4 }, &t)?.into_inner();
    Ok(QuinticData {
        t,
        truth,
        y,
        design,
    })
}

/// `k`-sparse coefficient vector in the DCT basis of `ℝⁿ` and its signal.
/// Amplitudes are `±(1 + |g|)` with `g` standard normal.
pub fn sparse_dct_signal(n: usize, k: usize, seed: u64) -> Result<(Vector, Vector)> {
    if k > n {
        bail!("sparsity exceeds length");
    }
    let d = dct_dictionary(n)?;
    let draw = gaussian_vector(n, seed);
    let support = top_k_support(&draw, k);
    let amps = gaussian_vector(k, seed.wrapping_add(1));
    let mut s = Vector::zeros(n);
    for (r, &i) in support.iter().enumerate() {
        s[i] = draw[i].signum() * (1.0 + amps[r].abs());
    }
    Ok((d.apply(&s), s))
}
