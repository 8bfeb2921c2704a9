//! SVD-based diagnostics and spectral filtering.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::error::{check_dim, domain, Result};
use crate::linalg::{SvdFactors, Vector, RANK_TOL};

/// Discrete Picard table: `σᵢ`, `|uᵢᵀy|` and their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardTable {
    pub sigma: Vec<f64>,
    pub coeff: Vec<f64>,
    pub ratio: Vec<f64>,
}

impl PicardTable {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }
}

pub fn picard_table(svd: &SvdFactors, y: &Vector) -> Result<PicardTable> {
    let c = svd.project(y)?;
    let coeff: Vec<f64> = c.iter().map(|v| v.abs()).collect();
    let ratio = svd
        .sigmas
        .iter()
        .zip(&coeff)
        .map(|(&s, &c)| {
            if s > 0.0 {
                c / s
            } else if c == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    Ok(PicardTable {
        sigma: svd.sigmas.clone(),
        coeff,
        ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IllPosedness {
    Mild,
    Moderate,
    Severe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: IllPosedness,
    /// Decay exponent of the power-law fit `σᵢ ≈ C·i^(−α)`.
    pub alpha_hat: f64,
    /// Residual sum of squares of the power-law fit in log space.
    pub power_rss: f64,
    /// Residual sum of squares of the exponential fit `σᵢ ≈ C·e^(−βi)`.
    pub exp_rss: f64,
}

/// Least-squares line through `(t, z)`; returns `(slope, residual sum of squares)`.
fn line_fit(t: &[f64], z: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let zm = z.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|v| (v - tm) * (v - tm)).sum();
    let stz: f64 = t.iter().zip(z).map(|(a, b)| (a - tm) * (b - zm)).sum();
    let slope = stz / stt;
    let rss = t.iter().zip(z).map(|(a, b)| {
        let r = b - zm - slope * (a - tm);
        r * r
    });
    (slope, rss.sum())
}

/// Power law vs exponential decay model selection on the positive singular
/// values. Exponential decay is severe; otherwise `α̂ ≤ 1` is mild and
/// `α̂ > 1` moderate.
pub fn classify_illposedness(sigmas: &[f64]) -> Result<Classification> {
    let pos: Vec<f64> = sigmas.iter().copied().filter(|s| *s > 0.0).collect();
    if pos.len() < 8 {
        return Err(domain(
            "classification needs at least 8 positive singular values",
        ));
    }
    let z: Vec<f64> = pos.iter().map(|s| s.ln()).collect();
    let idx: Vec<f64> = (1..=pos.len()).map(|i| i as f64).collect();
    let log_idx: Vec<f64> = idx.iter().map(|i| i.ln()).collect();
    let (p_slope, power_rss) = line_fit(&log_idx, &z);
    let (_, exp_rss) = line_fit(&idx, &z);
    let alpha_hat = -p_slope;
    let class = if exp_rss < power_rss {
        IllPosedness::Severe
    } else if alpha_hat <= 1.0 {
        IllPosedness::Mild
    } else {
        IllPosedness::Moderate
    };
    Ok(Classification {
        class,
        alpha_hat,
        power_rss,
        exp_rss,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    Tikhonov,
    Damped,
    Tsvd { k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterFactors {
    pub phi: Vec<f64>,
}

/// Tikhonov `σ²/(σ²+λ²)`, damped `σ/(σ+λ)` or truncation `1` for `i ≤ k`.
pub fn filter_factors(sigmas: &[f64], lambda: f64, kind: FilterKind) -> Result<FilterFactors> {
    if !(lambda >= 0.0) {
        return Err(domain("lambda must be non-negative"));
    }
    let phi = sigmas
        .iter()
        .enumerate()
        .map(|(i, &s)| match kind {
            _ if lambda == 0.0 && !matches!(kind, FilterKind::Tsvd { .. }) => 1.0,
            FilterKind::Tikhonov => s * s / (s * s + lambda * lambda),
            FilterKind::Damped => s / (s + lambda),
            FilterKind::Tsvd { k } => {
                if i < k {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .collect();
    Ok(FilterFactors { phi })
}

/// `Σ φᵢ (uᵢᵀy / σᵢ) vᵢ`, skipping components with `σᵢ = 0`.
pub fn filtered_solve(svd: &SvdFactors, y: &Vector, f: &FilterFactors) -> Result<Vector> {
    check_dim(svd.sigmas.len(), f.phi.len())?;
    let c = svd.project(y)?;
    let w = Vector::from_fn(c.len(), |i, _| {
        let s = svd.sigmas[i];
        if s > 0.0 {
            f.phi[i] * c[i] / s
        } else {
            0.0
        }
    });
    Ok(svd.synthesize(&w))
}

pub fn tsvd_solve(svd: &SvdFactors, y: &Vector, k: usize) -> Result<Vector> {
    if k == 0 || k > svd.rank(RANK_TOL) {
        return Err(domain("truncation index out of range"));
    }
    let f = filter_factors(&svd.sigmas, 0.0, FilterKind::Tsvd { k })?;
    filtered_solve(svd, y, &f)
}

pub fn tikhonov_svd_solve(svd: &SvdFactors, y: &Vector, lambda: f64) -> Result<Vector> {
    if !(lambda > 0.0) {
        return Err(domain("lambda must be positive"));
    }
    let c = svd.project(y)?;
    let l2 = lambda * lambda;
    let w = Vector::from_fn(c.len(), |i, _| {
        let s = svd.sigmas[i];
        s * c[i] / (s * s + l2)
    });
    Ok(svd.synthesize(&w))
}
