use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::image::ImageGrid;

/// Dimension-preserving image map used by RED and plug-and-play.
pub trait Denoiser {
    fn name(&self) -> &str;
    fn denoise(&self, x: &ImageGrid) -> ImageGrid;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityDenoiser;

impl Denoiser for IdentityDenoiser {
    fn name(&self) -> &str {
        "identity"
    }
    fn denoise(&self, x: &ImageGrid) -> ImageGrid {
        x.clone()
    }
}

/// Wraps a closure as a [`Denoiser`].
pub struct FnDenoiser {
    name: String,
    f: Box<dyn Fn(&ImageGrid) -> ImageGrid + Send + Sync>,
}

impl FnDenoiser {
    pub fn new(name: &str, f: impl Fn(&ImageGrid) -> ImageGrid + Send + Sync + 'static) -> Self {
        Self {
            name: String::from(name),
            f: Box::new(f),
        }
    }
}

impl Denoiser for FnDenoiser {
    fn name(&self) -> &str {
        &self.name
    }
    fn denoise(&self, x: &ImageGrid) -> ImageGrid {
        (self.f)(x)
    }
}

/// Windowed median with replicated borders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedianDenoiser {
    window_h: usize,
    window_w: usize,
    name: String,
}

pub fn median_denoiser(window_h: usize, window_w: usize) -> Result<MedianDenoiser> {
    if window_h % 2 == 0 || window_w % 2 == 0 {
        return Err(domain("median window sides must be odd"));
    }
    Ok(MedianDenoiser {
        window_h,
        window_w,
        name: alloc::format!("median-{window_h}x{window_w}"),
    })
}

impl Denoiser for MedianDenoiser {
    fn name(&self) -> &str {
        &self.name
    }
    fn denoise(&self, x: &ImageGrid) -> ImageGrid {
        median_filter(x, self.window_h, self.window_w)
    }
}

/// Per-pixel median over a `wh × ww` window, clamping reads at the border.
pub fn median_filter(x: &ImageGrid, wh: usize, ww: usize) -> ImageGrid {
    let (h, w) = (x.height() as isize, x.width() as isize);
    let (rh, rw) = ((wh / 2) as isize, (ww / 2) as isize);
    let mut buf: Vec<f64> = Vec::with_capacity(wh * ww);
    ImageGrid::from_fn(x.height(), x.width(), |i, j| {
        buf.clear();
        for di in -rh..=rh {
            let si = (i as isize + di).clamp(0, h - 1) as usize;
            for dj in -rw..=rw {
                let sj = (j as isize + dj).clamp(0, w - 1) as usize;
                buf.push(x.get(si, sj));
            }
        }
        let mid = buf.len() / 2;
        let (_, m, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
        *m
    })
}
