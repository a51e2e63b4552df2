//! Brute-force Betti curves, used as an independent check on the barcode
//! computation.
//!
//! For every threshold the mask of included pixels is rebuilt from scratch:
//! `b0` is counted with a fresh flat union-find over 4-adjacent included
//! pixels, and `b1` follows from the Euler characteristic of the complex
//! (`b1 = b0 - V + E - F` with V included pixels, E adjacent included
//! pairs, F fully included 2x2 blocks). Nothing here touches the filtration
//! or reduction code.

use super::HomologyDim;
use crate::imaging::IntensityGrid;

/// Betti number of the sublevel set of `grid` at threshold `t`.
pub fn oracle_betti_at(grid: &IntensityGrid, dim: HomologyDim, t: u8) -> usize {
    let w = grid.width() as usize;
    let h = grid.height() as usize;
    let included: Vec<bool> = grid.values().iter().map(|&v| v <= t).collect();
    let at = |x: usize, y: usize| included[y * w + x];

    let mut roots = FlatDsu::new(w * h);
    let mut vertices = 0usize;
    let mut edges = 0usize;
    let mut faces = 0usize;
    for y in 0..h {
        for x in 0..w {
            if !at(x, y) {
                continue;
            }
            vertices += 1;
            if x + 1 < w && at(x + 1, y) {
                edges += 1;
                roots.join(y * w + x, y * w + x + 1);
            }
            if y + 1 < h && at(x, y + 1) {
                edges += 1;
                roots.join(y * w + x, (y + 1) * w + x);
            }
            if x + 1 < w && y + 1 < h && at(x + 1, y) && at(x, y + 1) && at(x + 1, y + 1) {
                faces += 1;
            }
        }
    }

    let mut b0 = 0usize;
    for (i, &inc) in included.iter().enumerate() {
        if inc && roots.find(i) == i {
            b0 += 1;
        }
    }
    match dim {
        HomologyDim::Zero => b0,
        HomologyDim::One => b0 + edges - vertices - faces,
    }
}

/// The full curve `t -> betti(t)` for `t` in `0..=255`.
pub fn oracle_betti_curve(grid: &IntensityGrid, dim: HomologyDim) -> Vec<usize> {
    (0..=255u8).map(|t| oracle_betti_at(grid, dim, t)).collect()
}

/// Minimal union-find, deliberately separate from the one driving the
/// barcode sweep.
struct FlatDsu {
    parent: Vec<usize>,
}

impl FlatDsu {
    fn new(n: usize) -> FlatDsu {
        FlatDsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
            root
        } else {
            x
        }
    }

    fn join(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
