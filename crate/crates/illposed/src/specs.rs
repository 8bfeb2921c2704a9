//! Parsers for the compact command-line specs:
//!
//! * PSF: `gaussian:SIZE:SIGMA`, `gaussian-aniso:SIZE:SX:SY`,
//!   `disk:SIZE:RADIUS`, `motion:SIZE:LENGTH:ANGLE_DEG`
//! * noise: `none`, `gaussian:STD`, `poisson:SCALE`
//! * λ grid: `LO:HI:N`, log-spaced and inclusive
//! * λ list: `0.1` or `8e-5,0.0025,0.1`

use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use illposed_core::linalg::logspace;
use illposed_core::operators::{psf_build, NoiseModel, PsfParams};
use illposed_core::{Psf, PsfKind};

fn fields(s: &str) -> Vec<&str> {
    s.split(':').map(str::trim).collect()
}

fn num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| anyhow!("bad {what} {s:?}"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfSpec {
    pub kind: PsfKind,
    pub params: PsfParams,
}

impl PsfSpec {
    pub fn build(&self) -> Result<Psf> {
        Ok(psf_build(self.kind, &self.params)?)
    }
}

impl FromStr for PsfSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let f = fields(s);
        let size = || -> Result<usize> {
            num(
                f.get(1).ok_or_else(|| anyhow!("missing psf size"))?,
                "psf size",
            )
        };
        let arg = |k: usize, what: &str| -> Result<f64> {
            num(
                f.get(k)
                    .ok_or_else(|| anyhow!("psf spec {s:?} is missing {what}"))?,
                what,
            )
        };
        let mut params = PsfParams::default();
        let kind = match f[0] {
            "gaussian" => {
                params = PsfParams::gaussian(size()?, arg(2, "sigma")?);
                PsfKind::GaussianIso
            }
            "gaussian-aniso" => {
                params.size = size()?;
                params.sigma_x = arg(2, "sigma_x")?;
                params.sigma_y = arg(3, "sigma_y")?;
                PsfKind::GaussianAniso
            }
            "disk" => {
                params.size = size()?;
                params.radius = arg(2, "radius")?;
                PsfKind::Disk
            }
            "motion" => {
                params.size = size()?;
                params.length = arg(2, "length")?;
                params.angle_deg = arg(3, "angle")?;
                PsfKind::Motion
            }
            other => bail!("unknown psf kind {other:?}"),
        };
        Ok(Self { kind, params })
    }
}

/// `None` means noiseless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec(pub Option<NoiseModel>);

impl FromStr for NoiseSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let f = fields(s);
        let model = match (f[0], f.get(1)) {
            ("none", None) => None,
            ("gaussian", Some(std)) => Some(NoiseModel::Gaussian {
                mean: 0.0,
                std: num(std, "noise std")?,
            }),
            ("poisson", Some(scale)) => Some(NoiseModel::Poisson {
                scale: num(scale, "poisson scale")?,
            }),
            _ => bail!("unknown noise spec {s:?}"),
        };
        Ok(Self(model))
    }
}

/// Log-spaced grid `lo:hi:n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid(pub Vec<f64>);

impl FromStr for LambdaGrid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let f = fields(s);
        if f.len() != 3 {
            bail!("lambda grid must look like lo:hi:n, got {s:?}");
        }
        let lo: f64 = num(f[0], "grid start")?;
        let hi: f64 = num(f[1], "grid end")?;
        let n: usize = num(f[2], "grid size")?;
        if !(lo > 0.0 && hi > lo && n >= 2) {
            bail!("lambda grid needs 0 < lo < hi and n >= 2");
        }
        Ok(Self(logspace(lo, hi, n)))
    }
}

/// Comma-separated list of values.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T> {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|p| num(p.trim(), "list entry"))
            .collect::<Result<Vec<T>>>()
            .map(List)
            .with_context(|| format!("parsing list {s:?}"))
    }
}

/// Half-open index ranges `a:b` separated by commas.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranges(pub Vec<(usize, usize)>);

impl FromStr for Ranges {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let f = fields(part);
            if f.len() != 2 {
                bail!("range must look like a:b, got {part:?}");
            }
            let (a, b): (usize, usize) = (num(f[0], "range start")?, num(f[1], "range end")?);
            if a >= b {
                bail!("empty range {part:?}");
            }
            out.push((a, b));
        }
        Ok(Self(out))
    }
}
