//! Bundled synthetic corpus: deterministic 64×64 images in three styles
//! whose sublevel topology is easy to tell apart.
//!
//! Each style paints its shapes in a color that darkens exactly one RGB
//! channel — blobs show up in green, stripes in blue, rings in red — so
//! every style owns a channel where it has strong structure and the other
//! two styles are blank. That makes the one-vs-rest cross-average an
//! extremum for the right split, which is what the separation tests
//! exercise. Shape intensities are jittered per image so within-style
//! distances are small but nonzero; shape counts are fixed per style so
//! between-style distances dominate.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imaging::RgbImage;

pub const SIDE: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyStyle {
    /// Three filled disks: a handful of long-lived components, no loops.
    Blob,
    /// Twelve vertical stripes: many components, no loops.
    Stripe,
    /// Six annuli: mid count of components, six long-lived loops.
    Ring,
}

impl ToyStyle {
    pub const ALL: [ToyStyle; 3] = [ToyStyle::Blob, ToyStyle::Stripe, ToyStyle::Ring];

    pub fn name(self) -> &'static str {
        match self {
            ToyStyle::Blob => "blob",
            ToyStyle::Stripe => "stripe",
            ToyStyle::Ring => "ring",
        }
    }
}

/// Deterministically generate toy image `index` of a style.
pub fn toy_image(style: ToyStyle, index: u32) -> RgbImage {
    let style_tag = match style {
        ToyStyle::Blob => 1u64,
        ToyStyle::Stripe => 2,
        ToyStyle::Ring => 3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64((style_tag << 32) | index as u64);
    let mut pixels = vec![[255u8; 3]; (SIDE * SIDE) as usize];
    match style {
        ToyStyle::Blob => draw_blobs(&mut pixels, &mut rng),
        ToyStyle::Stripe => draw_stripes(&mut pixels, &mut rng),
        ToyStyle::Ring => draw_rings(&mut pixels, &mut rng),
    }
    RgbImage::new(SIDE, SIDE, pixels)
}

/// A dark shade with deterministic per-shape jitter.
fn shade(rng: &mut ChaCha8Rng) -> u8 {
    30 + rng.random_range(0..=25)
}

fn jitter(rng: &mut ChaCha8Rng, amount: i32) -> i32 {
    rng.random_range(-amount..=amount)
}

fn draw_blobs(pixels: &mut [[u8; 3]], rng: &mut ChaCha8Rng) {
    // Anchor points far enough apart that jittered disks stay disjoint.
    for (cx, cy) in [(16i32, 16i32), (44, 20), (28, 46)] {
        let cx = cx + jitter(rng, 3);
        let cy = cy + jitter(rng, 3);
        let radius = rng.random_range(6..=9);
        let v = shade(rng);
        for_each_pixel(|x, y| {
            if (x - cx).pow(2) + (y - cy).pow(2) <= radius * radius {
                pixels[(y * SIDE as i32 + x) as usize] = [255, v, 255];
            }
        });
    }
}

fn draw_stripes(pixels: &mut [[u8; 3]], rng: &mut ChaCha8Rng) {
    let x0 = rng.random_range(1..=3i32);
    for k in 0..12 {
        let v = shade(rng);
        for dx in 0..2 {
            let x = x0 + k * 5 + dx;
            for y in 0..SIDE as i32 {
                pixels[(y * SIDE as i32 + x) as usize] = [255, 255, v];
            }
        }
    }
}

fn draw_rings(pixels: &mut [[u8; 3]], rng: &mut ChaCha8Rng) {
    for (cx, cy) in [
        (11i32, 16i32),
        (32, 16),
        (53, 16),
        (11, 47),
        (32, 47),
        (53, 47),
    ] {
        let cx = cx + jitter(rng, 2);
        let cy = cy + jitter(rng, 2);
        let v = shade(rng);
        for_each_pixel(|x, y| {
            let d2 = (x - cx).pow(2) + (y - cy).pow(2);
            // Annulus between radii 4 and 7: the enclosed disk stays
            // white, so the loop lives until the background enters.
            if d2 > 16 && d2 <= 49 {
                pixels[(y * SIDE as i32 + x) as usize] = [v, 255, 255];
            }
        });
    }
}

fn for_each_pixel(mut f: impl FnMut(i32, i32)) {
    for y in 0..SIDE as i32 {
        for x in 0..SIDE as i32 {
            f(x, y);
        }
    }
}

fn write_corpus(dir: &Path, rows: &[(String, ToyStyle, u32, String)]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = String::from("image_id,path,group\n");
    for (id, style, index, group) in rows {
        let file = format!("{id}.png");
        toy_image(*style, *index).write_png(&dir.join(&file))?;
        manifest.push_str(&format!("{id},{file},{group}\n"));
    }
    let manifest_path = dir.join("manifest.csv");
    std::fs::write(&manifest_path, manifest).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest_path)
}

/// Write the 12-image corpus (4 per style) and its manifest; returns the
/// manifest path.
pub fn write_main_corpus(dir: &Path) -> Result<PathBuf> {
    let mut rows = Vec::new();
    for style in ToyStyle::ALL {
        for i in 0..4 {
            rows.push((
                format!("{}-{i:02}", style.name()),
                style,
                i,
                style.name().to_string(),
            ));
        }
    }
    write_corpus(dir, &rows)
}

/// Write the outlier corpus: ten blob images plus one ring image, for the
/// one-group-vs-single-image design. Returns the manifest path.
pub fn write_vs_single_corpus(dir: &Path) -> Result<PathBuf> {
    let mut rows = Vec::new();
    for i in 0..10 {
        // Index offset keeps these distinct from the main corpus images.
        rows.push((
            format!("blob-{:02}", 10 + i),
            ToyStyle::Blob,
            100 + i,
            "blob".to_string(),
        ));
    }
    rows.push((
        "outlier-00".to_string(),
        ToyStyle::Ring,
        100,
        "outlier".to_string(),
    ));
    write_corpus(dir, &rows)
}
