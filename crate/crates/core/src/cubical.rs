//! Sublevel-set filtered cubical complexes over intensity grids.
//!
//! Pixels are vertices, 4-adjacent pixels are joined by edges, and every
//! 2x2 pixel block carries a square (the V-construction). Each cell's
//! filtration value is the maximum of its vertices' pixel values, so the
//! complex at threshold `t` is exactly the complex built from the pixels
//! binarized at `t`. The full complex is built once; thresholded
//! complexes are views over the filtration values.

use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::IntensityGrid;

/// Binarization of a grid at one threshold; `true` = black = included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGrid {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BitGrid {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Write a 1-bit grayscale PNG; black pixels are the included ones.
    pub fn write_png(&self, path: &Path) -> Result<()> {
        let row_bytes = (self.width as usize).div_ceil(8);
        let mut packed = vec![0u8; row_bytes * self.height as usize];
        for y in 0..self.height as usize {
            for x in 0..self.width as usize {
                // PNG grayscale: 0 = black. Included bits become black.
                if !self.bits[y * self.width as usize + x] {
                    packed[y * row_bytes + x / 8] |= 0x80 >> (x % 8);
                }
            }
        }
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut encoder = png::Encoder::new(BufWriter::new(file), self.width, self.height);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::One);
        let mut writer = encoder
            .write_header()
            .map_err(|e| Error::integrity(format!("png encode {}: {e}", path.display())))?;
        writer
            .write_image_data(&packed)
            .map_err(|e| Error::integrity(format!("png encode {}: {e}", path.display())))?;
        Ok(())
    }
}

/// `bit(x, y) = value(x, y) <= t`.
pub fn binarize(grid: &IntensityGrid, t: u8) -> BitGrid {
    BitGrid {
        width: grid.width(),
        height: grid.height(),
        bits: grid.values().iter().map(|&v| v <= t).collect(),
    }
}

/// An edge between two 4-adjacent vertices; `a < b` in row-major ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub value: u8,
}

/// A square over a 2x2 pixel block, referencing its four boundary edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Square {
    /// Boundary edge ids: top, left, right, bottom.
    pub edges: [u32; 4],
    pub value: u8,
}

/// The full filtered complex of one grid.
///
/// Cell ids are assigned in row-major creation order per dimension and
/// depend only on the grid dimensions. Vertex ids coincide with
/// row-major pixel indices.
#[derive(Debug, Clone)]
pub struct FilteredCubicalComplex {
    width: u32,
    height: u32,
    vertex_values: Vec<u8>,
    edges: Vec<Edge>,
    squares: Vec<Square>,
}

/// Build the filtration: vertex value = pixel value, edge and square
/// values = max over their vertices.
pub fn build_filtration(grid: &IntensityGrid) -> FilteredCubicalComplex {
    let (w, h) = (grid.width() as usize, grid.height() as usize);
    let values = grid.values();

    let mut edges = Vec::with_capacity(w * (h - 1) + (w - 1) * h);
    // Row-major ids of the horizontal/vertical edge created at each pixel.
    let mut h_edge_id = vec![u32::MAX; w * h];
    let mut v_edge_id = vec![u32::MAX; w * h];
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                h_edge_id[v] = edges.len() as u32;
                edges.push(Edge {
                    a: v as u32,
                    b: (v + 1) as u32,
                    value: values[v].max(values[v + 1]),
                });
            }
            if y + 1 < h {
                v_edge_id[v] = edges.len() as u32;
                edges.push(Edge {
                    a: v as u32,
                    b: (v + w) as u32,
                    value: values[v].max(values[v + w]),
                });
            }
        }
    }

    let mut squares = Vec::with_capacity(w.saturating_sub(1) * h.saturating_sub(1));
    for y in 0..h.saturating_sub(1) {
        for x in 0..w.saturating_sub(1) {
            let v = y * w + x;
            let corners = [v, v + 1, v + w, v + w + 1];
            let value = corners.iter().map(|&c| values[c]).max().unwrap();
            squares.push(Square {
                edges: [
                    h_edge_id[v],     // top
                    v_edge_id[v],     // left
                    v_edge_id[v + 1], // right
                    h_edge_id[v + w], // bottom
                ],
                value,
            });
        }
    }

    FilteredCubicalComplex {
        width: grid.width(),
        height: grid.height(),
        vertex_values: values.to_vec(),
        edges,
        squares,
    }
}

impl FilteredCubicalComplex {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_values.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn square_count(&self) -> usize {
        self.squares.len()
    }

    pub fn vertex_values(&self) -> &[u8] {
        &self.vertex_values
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    /// Ids of vertices present in the sublevel complex at `t`.
    pub fn sublevel_vertices(&self, t: u8) -> impl Iterator<Item = u32> + '_ {
        self.vertex_values
            .iter()
            .enumerate()
            .filter(move |(_, &v)| v <= t)
            .map(|(i, _)| i as u32)
    }

    /// `(vertices, edges, squares)` counts of the sublevel complex at `t`.
    pub fn sublevel_counts(&self, t: u8) -> (usize, usize, usize) {
        let v = self.vertex_values.iter().filter(|&&x| x <= t).count();
        let e = self.edges.iter().filter(|e| e.value <= t).count();
        let s = self.squares.iter().filter(|s| s.value <= t).count();
        (v, e, s)
    }
}
