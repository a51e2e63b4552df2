//! Exhaustive matching enumeration — an independent oracle for the
//! distance solvers, usable only on small diagrams.
//!
//! Every partial matching (each point pairs with an opposite point or
//! goes to the diagonal) is enumerated; the bottleneck and 1-Wasserstein
//! optima are read off as the min-max and min-sum over all of them. With
//! at most ~6 points total this is a few hundred cases.

use super::{diagonal_cost, DiagramPoint, Norm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceDistances {
    pub bottleneck: f64,
    pub wasserstein1: f64,
}

pub fn brute_force_distances(a: &[DiagramPoint], b: &[DiagramPoint]) -> BruteForceDistances {
    let mut used_b = vec![false; b.len()];
    let mut choice: Vec<Option<usize>> = vec![None; a.len()];
    let mut best = BruteForceDistances {
        bottleneck: f64::INFINITY,
        wasserstein1: f64::INFINITY,
    };
    enumerate(a, b, 0, &mut used_b, &mut choice, &mut best);
    best
}

fn enumerate(
    a: &[DiagramPoint],
    b: &[DiagramPoint],
    i: usize,
    used_b: &mut Vec<bool>,
    choice: &mut Vec<Option<usize>>,
    best: &mut BruteForceDistances,
) {
    if i == a.len() {
        let mut max_linf = 0.0f64;
        let mut sum_l1 = 0.0f64;
        for (x, c) in choice.iter().enumerate() {
            match c {
                Some(j) => {
                    let p = a[x];
                    let q = b[*j];
                    max_linf =
                        max_linf.max((p.birth - q.birth).abs().max((p.death - q.death).abs()));
                    sum_l1 += (p.birth - q.birth).abs() + (p.death - q.death).abs();
                }
                None => {
                    max_linf = max_linf.max(diagonal_cost(a[x], Norm::Linf));
                    sum_l1 += diagonal_cost(a[x], Norm::L1);
                }
            }
        }
        for (j, used) in used_b.iter().enumerate() {
            if !used {
                max_linf = max_linf.max(diagonal_cost(b[j], Norm::Linf));
                sum_l1 += diagonal_cost(b[j], Norm::L1);
            }
        }
        best.bottleneck = best.bottleneck.min(max_linf);
        best.wasserstein1 = best.wasserstein1.min(sum_l1);
        return;
    }
    // a[i] goes to the diagonal…
    choice[i] = None;
    enumerate(a, b, i + 1, used_b, choice, best);
    // …or to any unused partner.
    for j in 0..b.len() {
        if !used_b[j] {
            used_b[j] = true;
            choice[i] = Some(j);
            enumerate(a, b, i + 1, used_b, choice, best);
            used_b[j] = false;
        }
    }
    choice[i] = None;
}
