//! Distances between persistence barcodes.
//!
//! Both metrics work on diagrams of finite points, so the essential class
//! is capped to death 256 first ([`capped_points`]). Bottleneck is solved
//! exactly by binary search over the candidate costs with a max-flow
//! feasibility check; 1-Wasserstein by an exact min-cost assignment on the
//! augmented diagram. All costs are multiples of 0.5 of integer inputs, so
//! double arithmetic is exact and no tolerances appear here.

mod assignment;
mod flow;
pub mod matrix;
pub mod reference;

pub use matrix::DistanceMatrix;

use assignment::{min_cost_assignment, CostMatrix};
use flow::FlowNetwork;

use crate::persistence::Barcode;

/// A finite point of a persistence diagram, after essential capping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> DiagramPoint {
        assert!(
            birth.is_finite() && death.is_finite() && death > birth,
            "diagram point must satisfy birth < death, both finite"
        );
        DiagramPoint { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Ground norm for matching costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    Linf,
}

/// The two barcode metrics of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Bottleneck,
    Wasserstein1,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Bottleneck, Metric::Wasserstein1];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Bottleneck => "bottleneck",
            Metric::Wasserstein1 => "wasserstein1",
        }
    }

    /// Short CLI code: `b` or `w1`.
    pub fn parse_code(code: &str) -> Option<Metric> {
        match code {
            "b" | "bottleneck" => Some(Metric::Bottleneck),
            "w1" | "wasserstein1" => Some(Metric::Wasserstein1),
            _ => None,
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Diagram points of a barcode with the essential class capped at 256.
pub fn capped_points(barcode: &Barcode) -> Vec<DiagramPoint> {
    barcode
        .intervals()
        .iter()
        .map(|iv| DiagramPoint::new(iv.birth as f64, iv.death_capped() as f64))
        .collect()
}

/// Drop points with persistence below `epsilon` (near-diagonal pruning,
/// applied only on the 1-Wasserstein path when requested).
pub fn pruned_points(points: &[DiagramPoint], epsilon: f64) -> Vec<DiagramPoint> {
    points
        .iter()
        .copied()
        .filter(|p| p.persistence() >= epsilon)
        .collect()
}

fn linf(p: DiagramPoint, q: DiagramPoint) -> f64 {
    (p.birth - q.birth).abs().max((p.death - q.death).abs())
}

fn l1(p: DiagramPoint, q: DiagramPoint) -> f64 {
    (p.birth - q.birth).abs() + (p.death - q.death).abs()
}

/// Cost of sending a point to its diagonal projection
/// ((birth+death)/2, (birth+death)/2).
pub fn diagonal_cost(p: DiagramPoint, norm: Norm) -> f64 {
    match norm {
        Norm::Linf => p.persistence() / 2.0,
        Norm::L1 => p.persistence(),
    }
}

/// A partial matching between two diagrams: matched index pairs plus the
/// leftovers on each side (which pay their diagonal cost).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
}

impl Matching {
    /// Check that pairs and leftovers partition both index ranges.
    pub fn assert_partitions(&self, n: usize, m: usize) {
        let mut seen_a = vec![false; n];
        let mut seen_b = vec![false; m];
        for &(i, j) in &self.pairs {
            assert!(!seen_a[i] && !seen_b[j], "index matched twice");
            seen_a[i] = true;
            seen_b[j] = true;
        }
        for &i in &self.unmatched_a {
            assert!(!seen_a[i], "index matched twice");
            seen_a[i] = true;
        }
        for &j in &self.unmatched_b {
            assert!(!seen_b[j], "index matched twice");
            seen_b[j] = true;
        }
        assert!(
            seen_a.iter().all(|&s| s) && seen_b.iter().all(|&s| s),
            "index left out"
        );
    }
}

/// Exact bottleneck distance between two same-dimension barcodes.
pub fn bottleneck(a: &Barcode, b: &Barcode) -> f64 {
    assert_eq!(
        a.dimension(),
        b.dimension(),
        "barcode dimensions must match"
    );
    bottleneck_points(&capped_points(a), &capped_points(b))
}

/// Exact 1-Wasserstein distance between two same-dimension barcodes.
pub fn wasserstein1(a: &Barcode, b: &Barcode) -> f64 {
    assert_eq!(
        a.dimension(),
        b.dimension(),
        "barcode dimensions must match"
    );
    wasserstein1_points(&capped_points(a), &capped_points(b))
}

/// Bottleneck distance on raw diagram points.
///
/// Candidate values are all pairwise L∞ costs, all diagonal costs, and 0;
/// the answer is the smallest candidate at which every point of both
/// diagrams can be covered by a matching of cost ≤ ε, with the diagonal as
/// an unlimited-capacity partner. Feasibility is decided by maximum
/// bipartite matching, phrased as max-flow.
pub fn bottleneck_points(a: &[DiagramPoint], b: &[DiagramPoint]) -> f64 {
    let mut candidates = vec![0.0f64];
    for p in a {
        candidates.push(diagonal_cost(*p, Norm::Linf));
        for q in b {
            candidates.push(linf(*p, *q));
        }
    }
    for q in b {
        candidates.push(diagonal_cost(*q, Norm::Linf));
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).expect("costs are finite"));
    candidates.dedup();

    // First feasible candidate in sorted order (feasibility is monotone).
    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Bottleneck value together with one matching realizing it.
pub fn bottleneck_points_with_matching(a: &[DiagramPoint], b: &[DiagramPoint]) -> (f64, Matching) {
    let eps = bottleneck_points(a, b);
    let mut net = feasibility_network(a, b, eps);
    let flow = net.max_flow(NODE_SOURCE, NODE_SINK);
    assert_eq!(
        flow as usize,
        a.len() + b.len(),
        "optimal value must be feasible"
    );
    let b_base = 2 + a.len();
    let absorb = 2 + a.len() + b.len();
    let mut matching = Matching {
        pairs: Vec::new(),
        unmatched_a: Vec::new(),
        unmatched_b: Vec::new(),
    };
    for i in 0..a.len() {
        for target in net.saturated_targets(2 + i) {
            if target == absorb {
                matching.unmatched_a.push(i);
            } else {
                matching.pairs.push((i, target - b_base));
            }
        }
    }
    for target in net.saturated_targets(absorb + 1) {
        if target != absorb {
            matching.unmatched_b.push(target - b_base);
        }
    }
    matching.assert_partitions(a.len(), b.len());
    (eps, matching)
}

const NODE_SOURCE: usize = 0;
const NODE_SINK: usize = 1;

/// Network whose max flow is n+m exactly when every point can be covered
/// within `eps`: source feeds each A point and a pooled diagonal supply;
/// A points reach compatible B points or the diagonal sink; the pooled
/// supply covers B points near the diagonal and overflows to the sink.
fn feasibility_network(a: &[DiagramPoint], b: &[DiagramPoint], eps: f64) -> FlowNetwork {
    let (n, m) = (a.len(), b.len());
    let b_base = 2 + n;
    let absorb = 2 + n + m; // A-side diagonal sink
    let supply = absorb + 1; // B-side diagonal source
    let mut net = FlowNetwork::new(supply + 1);
    for (i, p) in a.iter().enumerate() {
        net.add_edge(NODE_SOURCE, 2 + i, 1);
        for (j, q) in b.iter().enumerate() {
            if linf(*p, *q) <= eps {
                net.add_edge(2 + i, b_base + j, 1);
            }
        }
        if diagonal_cost(*p, Norm::Linf) <= eps {
            net.add_edge(2 + i, absorb, 1);
        }
    }
    if m > 0 {
        net.add_edge(NODE_SOURCE, supply, m as u32);
        for (j, q) in b.iter().enumerate() {
            if diagonal_cost(*q, Norm::Linf) <= eps {
                net.add_edge(supply, b_base + j, 1);
            }
            net.add_edge(b_base + j, NODE_SINK, 1);
        }
        net.add_edge(supply, absorb, m as u32);
    }
    if n > 0 {
        net.add_edge(absorb, NODE_SINK, n as u32);
    }
    net
}

fn feasible(a: &[DiagramPoint], b: &[DiagramPoint], eps: f64) -> bool {
    let want = (a.len() + b.len()) as u32;
    if want == 0 {
        return true;
    }
    feasibility_network(a, b, eps).max_flow(NODE_SOURCE, NODE_SINK) == want
}

/// Large stand-in for a forbidden assignment cell; never part of an
/// optimum because matching every point to its own diagonal is always
/// allowed.
const FORBIDDEN: f64 = (1u64 << 30) as f64;

/// 1-Wasserstein distance on raw diagram points: min-cost perfect matching
/// on the (n+m)×(n+m) augmented matrix where each point may also match its
/// own diagonal projection and diagonal-diagonal pairs cost 0.
pub fn wasserstein1_points(a: &[DiagramPoint], b: &[DiagramPoint]) -> f64 {
    wasserstein1_points_with_matching(a, b).0
}

/// 1-Wasserstein value together with one optimal matching.
pub fn wasserstein1_points_with_matching(
    a: &[DiagramPoint],
    b: &[DiagramPoint],
) -> (f64, Matching) {
    let (n, m) = (a.len(), b.len());
    let k = n + m;
    if k == 0 {
        return (
            0.0,
            Matching {
                pairs: Vec::new(),
                unmatched_a: Vec::new(),
                unmatched_b: Vec::new(),
            },
        );
    }
    // Rows: A points, then one diagonal copy per B point.
    // Columns: B points, then one diagonal copy per A point.
    let mut costs = vec![0.0f64; k * k];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            costs[i * k + j] = l1(*p, *q);
        }
        for t in 0..n {
            costs[i * k + m + t] = if t == i {
                diagonal_cost(*p, Norm::L1)
            } else {
                FORBIDDEN
            };
        }
    }
    for (s, q) in b.iter().enumerate() {
        for j in 0..m {
            costs[(n + s) * k + j] = if j == s {
                diagonal_cost(*q, Norm::L1)
            } else {
                FORBIDDEN
            };
        }
        // Diagonal-to-diagonal cells stay 0.
    }
    let (total, col_of_row) = min_cost_assignment(&CostMatrix::new(k, costs));
    assert!(total < FORBIDDEN, "assignment must avoid forbidden cells");

    let mut matching = Matching {
        pairs: Vec::new(),
        unmatched_a: Vec::new(),
        unmatched_b: Vec::new(),
    };
    for (i, &col) in col_of_row.iter().take(n).enumerate() {
        if col < m {
            matching.pairs.push((i, col));
        } else {
            matching.unmatched_a.push(i);
        }
    }
    for s in 0..m {
        if col_of_row[n + s] < m {
            matching.unmatched_b.push(s);
        }
    }
    matching.assert_partitions(n, m);
    (total, matching)
}
