//! Persistence barcodes of filtered cubical complexes.
//!
//! Dimension 0 is computed by a union-find sweep over edges in filtration
//! order (elder rule: the component with the lexicographically smaller
//! (birth value, vertex id) survives a merge). Dimension 1 is computed by
//! column reduction of the square boundaries over the edges, mod 2; the
//! edge columns themselves never need reducing since union-find already
//! settles dimension 0. Zero-length classes are discarded.
//!
//! Every nonempty grid is connected once all pixels are present, so the
//! dimension-0 barcode carries exactly one essential interval and the
//! dimension-1 barcode none.

pub mod format;
pub mod oracle;

use crate::cubical::FilteredCubicalComplex;

/// Homological dimension handled by this crate.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum HomologyDim {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
}

impl HomologyDim {
    pub const ALL: [HomologyDim; 2] = [HomologyDim::Zero, HomologyDim::One];

    pub fn index(self) -> u8 {
        match self {
            HomologyDim::Zero => 0,
            HomologyDim::One => 1,
        }
    }

    pub fn from_index(i: u8) -> Option<HomologyDim> {
        match i {
            0 => Some(HomologyDim::Zero),
            1 => Some(HomologyDim::One),
            _ => None,
        }
    }
}

impl std::fmt::Display for HomologyDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Death of a persistence class: a finite threshold or never (within range).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Death {
    Finite(u8),
    Essential,
}

/// A half-open interval `[birth, death)` of one homology class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub birth: u8,
    pub death: Death,
}

/// Death value with the essential class capped one past the threshold
/// range, keeping barcode distances finite.
pub const ESSENTIAL_CAP: u16 = 256;

impl Interval {
    pub fn finite(birth: u8, death: u8) -> Interval {
        assert!(birth < death, "finite interval must have birth < death");
        Interval {
            birth,
            death: Death::Finite(death),
        }
    }

    pub fn essential(birth: u8) -> Interval {
        Interval {
            birth,
            death: Death::Essential,
        }
    }

    pub fn is_essential(&self) -> bool {
        matches!(self.death, Death::Essential)
    }

    /// Death as a number in `[1, 256]`; essential maps to [`ESSENTIAL_CAP`].
    pub fn death_capped(&self) -> u16 {
        match self.death {
            Death::Finite(d) => d as u16,
            Death::Essential => ESSENTIAL_CAP,
        }
    }

    /// Whether `t` lies in `[birth, death)`; an essential interval has no
    /// upper bound.
    pub fn contains(&self, t: u8) -> bool {
        t >= self.birth
            && match self.death {
                Death::Finite(d) => (t as u16) < d as u16,
                Death::Essential => true,
            }
    }
}

/// A multiset of intervals for one homological dimension, kept sorted by
/// `(birth, death)` so equal barcodes compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barcode {
    dimension: HomologyDim,
    intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(dimension: HomologyDim, mut intervals: Vec<Interval>) -> Barcode {
        intervals.sort_by_key(|iv| (iv.birth, iv.death_capped()));
        Barcode {
            dimension,
            intervals,
        }
    }

    pub fn dimension(&self) -> HomologyDim {
        self.dimension
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn essential_count(&self) -> usize {
        self.intervals.iter().filter(|iv| iv.is_essential()).count()
    }
}

/// Number of intervals of `barcode` containing `t`.
pub fn betti_at(barcode: &Barcode, t: u8) -> usize {
    barcode
        .intervals()
        .iter()
        .filter(|iv| iv.contains(t))
        .count()
}

/// Compute the barcode of the sublevel filtration in the given dimension.
pub fn compute_barcode(complex: &FilteredCubicalComplex, dimension: HomologyDim) -> Barcode {
    let intervals = match dimension {
        HomologyDim::Zero => dim0_intervals(complex),
        HomologyDim::One => dim1_intervals(complex),
    };
    let barcode = Barcode::new(dimension, intervals);
    match dimension {
        HomologyDim::Zero => debug_assert_eq!(barcode.essential_count(), 1),
        HomologyDim::One => debug_assert_eq!(barcode.essential_count(), 0),
    }
    barcode
}

/// Stable counting sort of cell ids by filtration value (256 buckets),
/// preserving creation order within a value.
fn order_by_value(values: impl ExactSizeIterator<Item = u8> + Clone) -> Vec<u32> {
    let mut counts = [0usize; 257];
    for v in values.clone() {
        counts[v as usize + 1] += 1;
    }
    for i in 1..257 {
        counts[i] += counts[i - 1];
    }
    let mut out = vec![0u32; values.len()];
    for (id, v) in values.enumerate() {
        out[counts[v as usize]] = id as u32;
        counts[v as usize] += 1;
    }
    out
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    /// Per root: the minimal (birth value, vertex id) of the component.
    elder: Vec<(u8, u32)>,
}

impl UnionFind {
    fn new(vertex_values: &[u8]) -> UnionFind {
        UnionFind {
            parent: (0..vertex_values.len() as u32).collect(),
            size: vec![1; vertex_values.len()],
            elder: vertex_values
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i as u32))
                .collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Union by size; the merged root keeps the elder of both components.
    fn union(&mut self, a: u32, b: u32) {
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.elder[big as usize] = self.elder[big as usize].min(self.elder[small as usize]);
    }
}

fn dim0_intervals(complex: &FilteredCubicalComplex) -> Vec<Interval> {
    let mut uf = UnionFind::new(complex.vertex_values());
    let mut intervals = Vec::new();
    let edges = complex.edges();
    for &eid in &order_by_value(edges.iter().map(|e| e.value)) {
        let e = edges[eid as usize];
        let ra = uf.find(e.a);
        let rb = uf.find(e.b);
        if ra == rb {
            continue;
        }
        // Elder rule: the dying component is the one with the younger
        // (larger) elder pair.
        let dying_elder = uf.elder[ra as usize].max(uf.elder[rb as usize]);
        if dying_elder.0 < e.value {
            intervals.push(Interval::finite(dying_elder.0, e.value));
        }
        uf.union(ra, rb);
    }
    let root = uf.find(0);
    intervals.push(Interval::essential(uf.elder[root as usize].0));
    intervals
}

fn dim1_intervals(complex: &FilteredCubicalComplex) -> Vec<Interval> {
    let edges = complex.edges();
    let squares = complex.squares();
    // Total order of edges by (value, id); columns hold edge ranks so the
    // pivot is simply the maximum entry.
    let edge_order = order_by_value(edges.iter().map(|e| e.value));
    let mut rank = vec![0u32; edges.len()];
    let mut value_by_rank = vec![0u8; edges.len()];
    for (r, &eid) in edge_order.iter().enumerate() {
        rank[eid as usize] = r as u32;
        value_by_rank[r] = edges[eid as usize].value;
    }

    let mut intervals = Vec::new();
    let mut pivot_owner = vec![u32::MAX; edges.len()];
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(squares.len());
    let mut scratch: Vec<u32> = Vec::new();
    for &sid in &order_by_value(squares.iter().map(|s| s.value)) {
        let square = &squares[sid as usize];
        let mut col: Vec<u32> = square.edges.iter().map(|&e| rank[e as usize]).collect();
        col.sort_unstable();
        loop {
            let pivot = *col
                .last()
                .expect("square column cannot vanish in a planar complex");
            let owner = pivot_owner[pivot as usize];
            if owner == u32::MAX {
                pivot_owner[pivot as usize] = columns.len() as u32;
                let birth = value_by_rank[pivot as usize];
                if birth < square.value {
                    intervals.push(Interval::finite(birth, square.value));
                }
                columns.push(col);
                break;
            }
            add_mod2(&mut col, &columns[owner as usize], &mut scratch);
        }
    }
    intervals
}

/// Symmetric difference of two ascending rank lists (mod-2 column add).
fn add_mod2(col: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let mut i = 0;
    let mut j = 0;
    while i < col.len() && j < other.len() {
        match col[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(col[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&col[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(col, scratch);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::build_filtration;
    use crate::imaging::IntensityGrid;
    use rand::{Rng, SeedableRng};

    fn barcode_of(w: u32, h: u32, values: &[u8], dim: HomologyDim) -> Barcode {
        let grid = IntensityGrid::new(w, h, values.to_vec());
        compute_barcode(&build_filtration(&grid), dim)
    }

    #[test]
    fn constant_grid_is_contractible_at_birth() {
        for (w, h) in [(1u32, 1u32), (3, 2), (5, 5)] {
            let values = vec![0u8; (w * h) as usize];
            let b0 = barcode_of(w, h, &values, HomologyDim::Zero);
            assert_eq!(b0.intervals(), &[Interval::essential(0)]);
            let b1 = barcode_of(w, h, &values, HomologyDim::One);
            assert!(b1.is_empty());
        }
    }

    #[test]
    fn ring_grid_has_one_loop() {
        // Border 0, center 100: the border ring closes a loop at t=0 that
        // dies when the center (and its squares) enter at t=100.
        let values = [0, 0, 0, 0, 100, 0, 0, 0, 0];
        let b0 = barcode_of(3, 3, &values, HomologyDim::Zero);
        assert_eq!(b0.intervals(), &[Interval::essential(0)]);
        let b1 = barcode_of(3, 3, &values, HomologyDim::One);
        assert_eq!(b1.intervals(), &[Interval::finite(0, 100)]);
    }

    #[test]
    fn two_components_merge_under_elder_rule() {
        let b0 = barcode_of(3, 1, &[0, 50, 0], HomologyDim::Zero);
        assert_eq!(
            b0.intervals(),
            &[Interval::finite(0, 50), Interval::essential(0)]
        );
        assert!(barcode_of(3, 1, &[0, 50, 0], HomologyDim::One).is_empty());
    }

    #[test]
    fn all_255_grid_is_born_late() {
        let b0 = barcode_of(2, 2, &[255; 4], HomologyDim::Zero);
        assert_eq!(b0.intervals(), &[Interval::essential(255)]);
    }

    #[test]
    fn betti_at_conventions() {
        let essential = Barcode::new(HomologyDim::Zero, vec![Interval::essential(0)]);
        assert_eq!(betti_at(&essential, 200), 1);

        let b = Barcode::new(
            HomologyDim::Zero,
            vec![Interval::finite(0, 50), Interval::essential(0)],
        );
        // Half-open: 50 is not in [0, 50).
        assert_eq!(betti_at(&b, 50), 1);

        let c = Barcode::new(HomologyDim::One, vec![Interval::finite(0, 100)]);
        assert_eq!(betti_at(&c, 99), 1);
        assert_eq!(betti_at(&c, 100), 0);
    }

    #[test]
    fn zero_length_classes_are_discarded() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        for _ in 0..50 {
            // Coarse values force many simultaneous births and deaths.
            let values: Vec<u8> = (0..36)
                .map(|_| [0u8, 100, 200][rng.random_range(0..3)])
                .collect();
            for dim in HomologyDim::ALL {
                let b = barcode_of(6, 6, &values, dim);
                for iv in b.intervals() {
                    if let Death::Finite(d) = iv.death {
                        assert!(iv.birth < d);
                    }
                }
            }
        }
    }

    #[test]
    fn interval_counts_are_bounded_by_cells() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let w = rng.random_range(1..=10u32);
            let h = rng.random_range(1..=10u32);
            let values: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
            let grid = IntensityGrid::new(w, h, values);
            let complex = build_filtration(&grid);
            let b0 = compute_barcode(&complex, HomologyDim::Zero);
            assert!(b0.len() <= complex.vertex_count());
            assert_eq!(b0.essential_count(), 1);
            let b1 = compute_barcode(&complex, HomologyDim::One);
            assert!(b1.len() <= complex.edge_count());
            assert_eq!(b1.essential_count(), 0);
        }
    }

    #[test]
    fn identical_grids_give_identical_barcodes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let values: Vec<u8> = (0..144).map(|_| rng.random_range(0..8) * 32).collect();
        for dim in HomologyDim::ALL {
            let a = barcode_of(12, 12, &values, dim);
            let b = barcode_of(12, 12, &values, dim);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn matches_oracle_on_random_grids() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let w = rng.random_range(1..=12u32);
            let h = rng.random_range(1..=12u32);
            let values: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
            let grid = IntensityGrid::new(w, h, values);
            let complex = build_filtration(&grid);
            for dim in HomologyDim::ALL {
                let barcode = compute_barcode(&complex, dim);
                let curve = oracle::oracle_betti_curve(&grid, dim);
                for t in 0..=255u16 {
                    assert_eq!(
                        betti_at(&barcode, t as u8),
                        curve[t as usize],
                        "{w}x{h} grid, dim {dim}, t={t}"
                    );
                }
            }
        }
    }
}
