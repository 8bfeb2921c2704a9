//! Portable graymap files. Reading accepts plain (`P2`) and raw (`P5`)
//! graymaps with 8- or 16-bit samples and scales them to `[0, 1]`. Writing
//! always produces 8-bit `P5` after clamping to `[0, 1]`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use illposed_core::ImageGrid;

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed PGM: {0}")]
    Malformed(String),
}

fn malformed(msg: impl Into<String>) -> PgmError {
    PgmError::Malformed(msg.into())
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&'a str, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(malformed("unexpected end of header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| malformed("non-ascii header"))
    }

    fn number(&mut self, what: &str) -> Result<usize, PgmError> {
        self.token()?
            .parse()
            .map_err(|_| malformed(format!("bad {what}")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<ImageGrid, PgmError> {
    let mut h = Header { bytes, pos: 0 };
    let magic = h.token()?;
    let raw = match magic {
        "P2" => false,
        "P5" => true,
        other => return Err(malformed(format!("unsupported magic {other:?}"))),
    };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(malformed("empty image"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(malformed("maxval must be in 1..=65535"));
    }
    let n = width * height;
    let scale = 1.0 / maxval as f64;
    let mut data = Vec::with_capacity(n);
    if raw {
        // exactly one whitespace byte separates the header from the samples
        let start = h.pos + 1;
        let wide = maxval > 255;
        let need = if wide { 2 * n } else { n };
        let body = bytes
            .get(start..start + need)
            .ok_or_else(|| malformed("truncated sample data"))?;
        if wide {
            data.extend(
                body.chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale),
            );
        } else {
            data.extend(body.iter().map(|&b| b as f64 * scale));
        }
    } else {
        for _ in 0..n {
            let v = h.number("sample")?;
            if v > maxval {
                return Err(malformed("sample exceeds maxval"));
            }
            data.push(v as f64 * scale);
        }
    }
    ImageGrid::new(height, width, data).map_err(|e| malformed(e.to_string()))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<ImageGrid, PgmError> {
    decode_pgm(&fs::read(path)?)
}

/// 8-bit `P5` encoding; values are clamped to `[0, 1]` and rounded.
pub fn encode_pgm(img: &ImageGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(
        img.data()
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    out
}

pub fn write_pgm(mut w: impl Write, img: &ImageGrid) -> io::Result<()> {
    w.write_all(&encode_pgm(img))
}

/// Plain-text `P2` encoding at the given maxval.
pub fn encode_pgm_plain(img: &ImageGrid, maxval: u16) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n{}\n", img.width(), img.height(), maxval);
    for i in 0..img.height() {
        let row: Vec<String> = (0..img.width())
            .map(|j| ((img.get(i, j).clamp(0.0, 1.0) * maxval as f64).round() as u16).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}
