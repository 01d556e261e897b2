//! Rasterization of labelled clouds in an orthonormal basis of `1⊥`.

use crate::error::{Result, SadicError};
use crate::fractal::{plane_basis, LabeledCloud};
use crate::geometry::Patch;

pub const BACKGROUND: [u8; 3] = [0, 0, 0];

/// One fixed colour per letter.
pub const PALETTE: [[u8; 3]; 3] = [[230, 85, 60], [70, 170, 90], [70, 120, 230]];

#[derive(Clone, Debug)]
pub struct RenderOptions {
    pub width: usize,
    pub height: usize,
    /// Half-width of the viewed square in plane coordinates; fitted to the
    /// data when `None`.
    pub extent: Option<f64>,
    /// Also draw the translates `x + R(i)` of this patch, dimmed.
    pub translates: Option<Patch>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { width: 800, height: 800, extent: None, translates: None }
    }
}

/// Row-major RGB image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
}

impl Image {
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Image> {
        let bad = |m: &str| SadicError::Parse(format!("ppm: {m}"));
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?.to_string());
        }
        if fields[0] != "P6" || fields[3] != "255" {
            return Err(bad("expected P6 with maxval 255"));
        }
        let width: usize = fields[1].parse().map_err(|_| bad("width"))?;
        let height: usize = fields[2].parse().map_err(|_| bad("height"))?;
        let rgb = bytes.get(pos + 1..).ok_or_else(|| bad("missing data"))?.to_vec();
        if rgb.len() != width * height * 3 {
            return Err(bad("data length"));
        }
        Ok(Image { width, height, rgb })
    }

    pub fn to_rgba(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width * self.height * 4);
        for px in self.rgb.chunks(3) {
            out.extend_from_slice(px);
            out.push(255);
        }
        out
    }

    /// Number of pixels of each distinct non-background colour.
    pub fn color_counts(&self) -> std::collections::BTreeMap<[u8; 3], usize> {
        let mut m = std::collections::BTreeMap::new();
        for px in self.rgb.chunks(3) {
            let c = [px[0], px[1], px[2]];
            if c != BACKGROUND {
                *m.entry(c).or_insert(0) += 1;
            }
        }
        m
    }
}

fn dim(c: [u8; 3]) -> [u8; 3] {
    c.map(|x| (x as u16 * 2 / 5) as u8)
}

pub fn render(cloud: &LabeledCloud, opts: &RenderOptions) -> Result<Image> {
    if opts.width == 0 || opts.height == 0 {
        return Err(SadicError::InvalidArgument("image size must be positive".into()));
    }
    let (b1, b2) = plane_basis();
    let coords = |p: &[f64; 3]| {
        (
            p[0] * b1[0] + p[1] * b1[1] + p[2] * b1[2],
            p[0] * b2[0] + p[1] * b2[1] + p[2] * b2[2],
        )
    };
    let mut layers: Vec<([f64; 3], bool)> = Vec::new();
    if let Some(t) = &opts.translates {
        for f in t.iter() {
            let x = [f.x[0] as f64, f.x[1] as f64, f.x[2] as f64];
            if f.x.iter().any(|&a| a != 0) {
                layers.push((x, true));
            }
        }
    }
    layers.push(([0.0; 3], false));
    let extent = match opts.extent {
        Some(e) if e > 0.0 => e,
        Some(_) => return Err(SadicError::InvalidArgument("extent must be positive".into())),
        None => {
            let m = cloud
                .points
                .iter()
                .map(|p| {
                    let (a, b) = coords(p);
                    a.abs().max(b.abs())
                })
                .fold(0.0, f64::max);
            if m > 0.0 {
                m * 1.05
            } else {
                1.0
            }
        }
    };
    let (w, h) = (opts.width, opts.height);
    let scale = 0.5 * w.min(h) as f64 / extent;
    let mut rgb = vec![0u8; w * h * 3];
    for (x, dimmed) in layers {
        for (p, l) in cloud.points.iter().zip(&cloud.labels) {
            let (a, b) = coords(&[p[0] + x[0], p[1] + x[1], p[2] + x[2]]);
            let col = (w as f64 / 2.0 + a * scale).floor();
            let row = (h as f64 / 2.0 - b * scale).floor();
            if col < 0.0 || row < 0.0 || col >= w as f64 || row >= h as f64 {
                continue;
            }
            let k = (row as usize * w + col as usize) * 3;
            let c = PALETTE[l.index() % 3];
            rgb[k..k + 3].copy_from_slice(&if dimmed { dim(c) } else { c });
        }
    }
    Ok(Image { width: w, height: h, rgb })
}
