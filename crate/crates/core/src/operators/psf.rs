#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::error::{domain, Result};
use crate::image::ImageGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsfKind {
    GaussianIso,
    GaussianAniso,
    Disk,
    Motion,
}

/// Shape parameters; each kind reads only the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfParams {
    pub size: usize,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub radius: f64,
    pub length: f64,
    pub angle_deg: f64,
}

impl Default for PsfParams {
    fn default() -> Self {
        Self {
            size: 5,
            sigma_x: 1.0,
            sigma_y: 1.0,
            radius: 2.0,
            length: 5.0,
            angle_deg: 0.0,
        }
    }
}

impl PsfParams {
    pub fn gaussian(size: usize, sigma: f64) -> Self {
        Self {
            size,
            sigma_x: sigma,
            sigma_y: sigma,
            ..Self::default()
        }
    }
}

/// Non-negative, unit-sum blur kernel with odd sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Psf {
    kernel: ImageGrid,
    kind: PsfKind,
}

impl Psf {
    pub fn kernel(&self) -> &ImageGrid {
        &self.kernel
    }

    pub fn kind(&self) -> PsfKind {
        self.kind
    }
}

pub fn psf_build(kind: PsfKind, p: &PsfParams) -> Result<Psf> {
    if p.size == 0 || p.size % 2 == 0 {
        return Err(domain("psf size must be odd"));
    }
    let c = (p.size / 2) as f64;
    let kernel = match kind {
        PsfKind::GaussianIso | PsfKind::GaussianAniso => {
            let (sx, sy) = match kind {
                PsfKind::GaussianIso => (p.sigma_x, p.sigma_x),
                _ => (p.sigma_x, p.sigma_y),
            };
            if !(sx > 0.0 && sy > 0.0) {
                return Err(domain("psf sigma must be positive"));
            }
            ImageGrid::from_fn(p.size, p.size, |i, j| {
                let (di, dj) = (i as f64 - c, j as f64 - c);
                (-(di * di / (2.0 * sx * sx) + dj * dj / (2.0 * sy * sy))).exp()
            })
        }
        PsfKind::Disk => {
            if !(p.radius >= 0.0) {
                return Err(domain("disk radius must be non-negative"));
            }
            let r2 = p.radius * p.radius;
            ImageGrid::from_fn(p.size, p.size, |i, j| {
                let (di, dj) = (i as f64 - c, j as f64 - c);
                if di * di + dj * dj <= r2 + 1e-12 {
                    1.0
                } else {
                    0.0
                }
            })
        }
        PsfKind::Motion => {
            if !(p.length >= 0.0) {
                return Err(domain("motion length must be non-negative"));
            }
            let mut k = ImageGrid::zeros(p.size, p.size);
            let (s, co) = p.angle_deg.to_radians().sin_cos();
            let steps = (4.0 * p.length).ceil().max(1.0) as usize;
            for t in 0..=steps {
                let r = -0.5 * p.length + p.length * t as f64 / steps as f64;
                // rows grow downwards, so a positive angle tilts the line upwards
                let i = (c - r * s).round();
                let j = (c + r * co).round();
                if i >= 0.0 && j >= 0.0 && (i as usize) < p.size && (j as usize) < p.size {
                    k.set(i as usize, j as usize, 1.0);
                }
            }
            k
        }
    };
    let sum: f64 = kernel.data().iter().sum();
    Ok(Psf {
        kernel: kernel.map(|v| v / sum),
        kind,
    })
}
