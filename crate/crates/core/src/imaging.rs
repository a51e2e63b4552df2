//! Image decoding and channel extraction.
//!
//! Every image is decomposed into five intensity channels: the raw red,
//! green and blue components, a luma grayscale, and an inverted Sobel
//! edge map. Each channel is an [`IntensityGrid`] of values in `[0, 255]`
//! that downstream code filters by sublevel sets (`value <= t` counts as
//! present at threshold `t`). The edge map is inverted so that strong
//! contours sit at low values and enter the filtration first.

use std::path::Path;

use crate::error::{Error, Result};

/// Rec.601 luma weights for the grayscale channel.
const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// The five channels extracted from every image, in report order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Red,
    Green,
    Blue,
    Gray,
    Edge,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::Red,
        Channel::Green,
        Channel::Blue,
        Channel::Gray,
        Channel::Edge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Red => "red",
            Channel::Green => "green",
            Channel::Blue => "blue",
            Channel::Gray => "gray",
            Channel::Edge => "edge",
        }
    }

    pub fn parse(s: &str) -> Option<Channel> {
        match s {
            "red" => Some(Channel::Red),
            "green" => Some(Channel::Green),
            "blue" => Some(Channel::Blue),
            "gray" => Some(Channel::Gray),
            "edge" => Some(Channel::Edge),
            _ => None,
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A decoded color image, row-major `(r, g, b)` triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    /// Panics if dimensions are zero or the pixel count does not match.
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Self {
        assert!(width >= 1 && height >= 1, "image must be at least 1x1");
        assert_eq!(
            pixels.len(),
            width as usize * height as usize,
            "pixel count must equal width * height"
        );
        RgbImage {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    /// Encode as an 8-bit RGB PNG.
    pub fn write_png(&self, path: &Path) -> Result<()> {
        let flat: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        let img = image::RgbImage::from_raw(self.width, self.height, flat)
            .expect("dimensions match buffer");
        img.save_with_format(path, image::ImageFormat::Png)
            .map_err(|source| match source {
                image::ImageError::IoError(e) => Error::io(path, e),
                other => Error::Decode {
                    path: path.to_path_buf(),
                    source: other,
                },
            })
    }
}

/// One channel of one image: a rectangular grid of intensities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntensityGrid {
    width: u32,
    height: u32,
    values: Vec<u8>,
}

impl IntensityGrid {
    pub fn new(width: u32, height: u32, values: Vec<u8>) -> Self {
        assert!(width >= 1 && height >= 1, "grid must be at least 1x1");
        assert_eq!(
            values.len(),
            width as usize * height as usize,
            "value count must equal width * height"
        );
        IntensityGrid {
            width,
            height,
            values,
        }
    }

    /// Grid with every value equal to `v`.
    pub fn constant(width: u32, height: u32, v: u8) -> Self {
        Self::new(width, height, vec![v; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Encode as an 8-bit grayscale PNG.
    pub fn write_png(&self, path: &Path) -> Result<()> {
        let img = image::GrayImage::from_raw(self.width, self.height, self.values.clone())
            .expect("dimensions match buffer");
        img.save_with_format(path, image::ImageFormat::Png)
            .map_err(|source| match source {
                image::ImageError::IoError(e) => Error::io(path, e),
                other => Error::Decode {
                    path: path.to_path_buf(),
                    source: other,
                },
            })
    }
}

/// The five channels of one image; all grids share the image dimensions.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    pub red: IntensityGrid,
    pub green: IntensityGrid,
    pub blue: IntensityGrid,
    pub gray: IntensityGrid,
    pub edge: IntensityGrid,
}

impl ChannelSet {
    fn assert_dims(&self) {
        let (w, h) = (self.red.width(), self.red.height());
        for ch in Channel::ALL {
            let g = self.get(ch);
            assert_eq!(
                (g.width(), g.height()),
                (w, h),
                "channel grids must share dimensions"
            );
        }
    }

    pub fn get(&self, channel: Channel) -> &IntensityGrid {
        match channel {
            Channel::Red => &self.red,
            Channel::Green => &self.green,
            Channel::Blue => &self.blue,
            Channel::Gray => &self.gray,
            Channel::Edge => &self.edge,
        }
    }

    pub fn width(&self) -> u32 {
        self.red.width()
    }

    pub fn height(&self) -> u32 {
        self.red.height()
    }
}

/// Decode a PNG or JPEG file. Alpha is composited over white; palette
/// images are expanded to RGB.
pub fn load_image(path: &Path) -> Result<RgbImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

/// Decode from raw bytes (the parsing entry point behind [`load_image`]).
pub fn decode_image(bytes: &[u8]) -> std::result::Result<RgbImage, image::ImageError> {
    let dynamic = image::load_from_memory(bytes)?;
    let rgba = dynamic.to_rgba8();
    let (width, height) = rgba.dimensions();
    let pixels = rgba
        .pixels()
        .map(|p| {
            let [r, g, b, a] = p.0;
            [
                composite_over_white(r, a),
                composite_over_white(g, a),
                composite_over_white(b, a),
            ]
        })
        .collect();
    Ok(RgbImage::new(width, height, pixels))
}

fn composite_over_white(component: u8, alpha: u8) -> u8 {
    if alpha == 255 {
        return component;
    }
    let a = alpha as f64 / 255.0;
    let out = component as f64 * a + 255.0 * (1.0 - a);
    out.round().clamp(0.0, 255.0) as u8
}

/// Cap the longest side at `max_side`, preserving aspect ratio.
///
/// Images already within the cap are returned unchanged. Scaling uses
/// bilinear interpolation with components rounded to the nearest integer;
/// the short side is rounded and clamped to at least one pixel.
pub fn resize_capped(img: &RgbImage, max_side: u32) -> RgbImage {
    assert!(max_side >= 1, "max_side must be at least 1");
    let (w, h) = (img.width(), img.height());
    if w.max(h) <= max_side {
        return img.clone();
    }
    let scale = max_side as f64 / w.max(h) as f64;
    let (dst_w, dst_h) = if w >= h {
        (max_side, ((h as f64 * scale).round() as u32).max(1))
    } else {
        (((w as f64 * scale).round() as u32).max(1), max_side)
    };
    bilinear_resize(img, dst_w, dst_h)
}

fn bilinear_resize(img: &RgbImage, dst_w: u32, dst_h: u32) -> RgbImage {
    let (src_w, src_h) = (img.width() as f64, img.height() as f64);
    let x_ratio = src_w / dst_w as f64;
    let y_ratio = src_h / dst_h as f64;
    let mut pixels = Vec::with_capacity(dst_w as usize * dst_h as usize);
    for oy in 0..dst_h {
        // Pixel-center mapping: dst center (oy + 0.5) lands at src coordinate.
        let sy = ((oy as f64 + 0.5) * y_ratio - 0.5).clamp(0.0, src_h - 1.0);
        let y0 = sy.floor() as u32;
        let y1 = (y0 + 1).min(img.height() - 1);
        let fy = sy - y0 as f64;
        for ox in 0..dst_w {
            let sx = ((ox as f64 + 0.5) * x_ratio - 0.5).clamp(0.0, src_w - 1.0);
            let x0 = sx.floor() as u32;
            let x1 = (x0 + 1).min(img.width() - 1);
            let fx = sx - x0 as f64;
            let mut out = [0u8; 3];
            for (c, slot) in out.iter_mut().enumerate() {
                let p00 = img.pixel(x0, y0)[c] as f64;
                let p10 = img.pixel(x1, y0)[c] as f64;
                let p01 = img.pixel(x0, y1)[c] as f64;
                let p11 = img.pixel(x1, y1)[c] as f64;
                let top = p00 + (p10 - p00) * fx;
                let bottom = p01 + (p11 - p01) * fx;
                let v = top + (bottom - top) * fy;
                *slot = v.round().clamp(0.0, 255.0) as u8;
            }
            pixels.push(out);
        }
    }
    RgbImage::new(dst_w, dst_h, pixels)
}

/// Split an image into its five channels.
pub fn extract_channels(img: &RgbImage) -> ChannelSet {
    let (w, h) = (img.width(), img.height());
    let mut red = Vec::with_capacity(img.pixels().len());
    let mut green = Vec::with_capacity(img.pixels().len());
    let mut blue = Vec::with_capacity(img.pixels().len());
    for &[r, g, b] in img.pixels() {
        red.push(r);
        green.push(g);
        blue.push(b);
    }
    let set = ChannelSet {
        red: IntensityGrid::new(w, h, red),
        green: IntensityGrid::new(w, h, green),
        blue: IntensityGrid::new(w, h, blue),
        gray: grayscale(img),
        edge: edge_map(img),
    };
    set.assert_dims();
    set
}

/// Rec.601 luma: `round(0.299 r + 0.587 g + 0.114 b)`.
pub fn grayscale(img: &RgbImage) -> IntensityGrid {
    let values = img
        .pixels()
        .iter()
        .map(|&[r, g, b]| {
            let y = LUMA_R * r as f64 + LUMA_G * g as f64 + LUMA_B * b as f64;
            y.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    IntensityGrid::new(img.width(), img.height(), values)
}

/// Inverted Sobel edge map.
///
/// Gradient magnitudes are computed on the grayscale image with 3x3 Sobel
/// kernels (replicated borders), normalized by the global maximum, and
/// inverted: `255 - round(255 * m / m_max)`. Strong contours come out
/// dark so they enter the sublevel filtration first. A gradient-free
/// image maps to all 255.
pub fn edge_map(img: &RgbImage) -> IntensityGrid {
    let gray = grayscale(img);
    let (w, h) = (gray.width() as i64, gray.height() as i64);
    let at = |x: i64, y: i64| -> f64 {
        // Border replication.
        let cx = x.clamp(0, w - 1) as u32;
        let cy = y.clamp(0, h - 1) as u32;
        gray.get(cx, cy) as f64
    };
    let mut magnitudes = vec![0.0f64; (w * h) as usize];
    let mut max_mag = 0.0f64;
    for y in 0..h {
        for x in 0..w {
            let gx = -at(x - 1, y - 1) + at(x + 1, y - 1) - 2.0 * at(x - 1, y) + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1)
                + at(x + 1, y + 1);
            let gy = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1)
                + 2.0 * at(x, y + 1)
                + at(x + 1, y + 1);
            let m = (gx * gx + gy * gy).sqrt();
            magnitudes[(y * w + x) as usize] = m;
            if m > max_mag {
                max_mag = m;
            }
        }
    }
    let values = if max_mag == 0.0 {
        vec![255u8; magnitudes.len()]
    } else {
        magnitudes
            .iter()
            .map(|&m| 255 - (255.0 * m / max_mag).round() as u8)
            .collect()
    };
    IntensityGrid::new(gray.width(), gray.height(), values)
}
