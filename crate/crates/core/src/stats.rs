//! Permutation tests on cross-sample average distances.
//!
//! The statistic for a split (A, B) of the pooled ids is the mean distance
//! between the two sides, looked up in a precomputed [`DistanceMatrix`].
//! When the number of distinct splits C(n, |A|) fits inside the
//! permutation budget the test enumerates all of them; otherwise it draws
//! uniform random splits from a seeded generator. Draws are processed in
//! fixed-size chunks, each with its own RNG stream, so results do not
//! depend on how many worker threads ran them.
//!
//! One wrinkle: when |A| = n/2, the complement of the observed subset
//! describes the same unordered partition and necessarily ties the
//! observed statistic. Such splits count toward the quantile (their
//! statistic is ≤ the observed one) but are not treated as competitors
//! when deciding the strict MIN/MAX flags, which is what makes the flag
//! match the "unique extremum" reading on symmetric designs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::DistanceMatrix;

/// How the permutation distribution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PermMode {
    #[serde(rename = "exhaustive")]
    Exhaustive,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

/// Whether the observed split was a strict extremum of the distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Min,
    Max,
    None,
}

/// Result of one permutation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationOutcome {
    /// Cross-average distance of the observed split.
    pub observed: f64,
    /// Quantile of the observed statistic in the permutation distribution.
    pub q: f64,
    /// Number of permuted statistics behind `q` (splits enumerated or
    /// drawn).
    pub n_permutations: usize,
    /// Raw count of permuted statistics ≤ observed.
    pub le_count: usize,
    /// Permuted splits (other than the observed partition) whose statistic
    /// exactly ties the observed one; nonzero values deserve a warning in
    /// reports.
    pub tie_count: usize,
    pub mode: PermMode,
    /// Generator seed (Monte Carlo only).
    pub seed: Option<u64>,
    pub flag: Flag,
    /// Two-sided call at level alpha: q ≤ alpha/2 or q ≥ 1 − alpha/2.
    pub significant: bool,
}

/// Permutation test of the split (labels_a, rest), auto-selecting
/// exhaustive enumeration when it fits in `n_perms`.
pub fn permutation_test(
    dmat: &DistanceMatrix,
    labels_a: &[String],
    n_perms: usize,
    seed: u64,
    alpha: f64,
) -> Result<PermutationOutcome> {
    permutation_test_with_mode(dmat, labels_a, n_perms, seed, alpha, None)
}

/// As [`permutation_test`], but `force` can pin the sampling mode; tests
/// use this to exercise Monte Carlo sampling on small matrices.
pub fn permutation_test_with_mode(
    dmat: &DistanceMatrix,
    labels_a: &[String],
    n_perms: usize,
    seed: u64,
    alpha: f64,
    force: Option<PermMode>,
) -> Result<PermutationOutcome> {
    assert!(n_perms >= 1, "need at least one permutation");
    assert!((0.0..1.0).contains(&alpha), "alpha must be in (0, 1)");
    let n = dmat.len();
    let mut a_sorted = Vec::with_capacity(labels_a.len());
    for id in labels_a {
        a_sorted.push(dmat.index_of(id)?);
    }
    a_sorted.sort_unstable();
    a_sorted.dedup();
    assert_eq!(
        a_sorted.len(),
        labels_a.len(),
        "labels_a must not repeat ids"
    );
    let k = a_sorted.len();
    assert!(k >= 1 && k < n, "labels_a must be a nonempty proper subset");

    let engine = StatEngine::new(dmat, k);
    let observed = engine.statistic(&a_sorted);
    let comp_sorted: Vec<usize> = (0..n).filter(|i| !a_sorted.contains(i)).collect();
    let symmetric = 2 * k == n;

    let mode = force.unwrap_or_else(|| {
        if binomial(n, k) <= n_perms as u128 {
            PermMode::Exhaustive
        } else {
            PermMode::MonteCarlo
        }
    });

    let is_observed_partition =
        |subset: &[usize]| subset == a_sorted || (symmetric && subset == comp_sorted);

    let (counts, n_permutations, q, out_seed) = match mode {
        PermMode::Exhaustive => {
            let mut counts = Counts::default();
            for_each_combination(n, k, |subset| {
                counts.tally(
                    engine.statistic(subset),
                    observed,
                    is_observed_partition(subset),
                );
            });
            // The observed split is among the enumerated ones; no add-one
            // correction.
            let total = counts.total;
            let q = counts.le as f64 / total as f64;
            (counts, total, q, None)
        }
        PermMode::MonteCarlo => {
            const CHUNK: usize = 1024;
            let n_chunks = n_perms.div_ceil(CHUNK);
            let counts = (0..n_chunks)
                .into_par_iter()
                .map(|chunk| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(chunk as u64 + 1);
                    let draws = CHUNK.min(n_perms - chunk * CHUNK);
                    let mut pool: Vec<usize> = (0..n).collect();
                    let mut subset = vec![0usize; k];
                    let mut counts = Counts::default();
                    for _ in 0..draws {
                        for i in 0..k {
                            let j = rng.random_range(i..n);
                            pool.swap(i, j);
                        }
                        subset.copy_from_slice(&pool[..k]);
                        subset.sort_unstable();
                        counts.tally(
                            engine.statistic(&subset),
                            observed,
                            is_observed_partition(&subset),
                        );
                    }
                    counts
                })
                .reduce(Counts::default, Counts::merge);
            // Add-one correction folds the observed split into both counts.
            let q = (counts.le + 1) as f64 / (n_perms + 1) as f64;
            (counts, n_perms, q, Some(seed))
        }
    };

    let compared = counts.higher + counts.lower + counts.ties;
    let flag = if compared == 0 || counts.ties > 0 {
        Flag::None
    } else if counts.higher == 0 {
        Flag::Max
    } else if counts.lower == 0 {
        Flag::Min
    } else {
        Flag::None
    };

    Ok(PermutationOutcome {
        observed,
        q,
        n_permutations,
        le_count: counts.le,
        tie_count: counts.ties,
        mode,
        seed: out_seed,
        flag,
        significant: q <= alpha / 2.0 || q >= 1.0 - alpha / 2.0,
    })
}

/// One-vs-rest convenience: sample A is every id of `target`.
pub fn one_vs_rest(
    dmat: &DistanceMatrix,
    groups: &BTreeMap<String, String>,
    target: &str,
    n_perms: usize,
    seed: u64,
    alpha: f64,
) -> Result<PermutationOutcome> {
    let labels_a: Vec<String> = dmat
        .ids()
        .iter()
        .filter(|id| groups.get(*id).map(String::as_str) == Some(target))
        .cloned()
        .collect();
    if labels_a.is_empty() {
        return Err(Error::integrity(format!(
            "group `{target}` has no ids in the distance matrix"
        )));
    }
    permutation_test(dmat, &labels_a, n_perms, seed, alpha)
}

#[derive(Debug, Default, Clone, Copy)]
struct Counts {
    total: usize,
    le: usize,
    /// The three below exclude splits equal to the observed partition.
    higher: usize,
    lower: usize,
    ties: usize,
}

impl Counts {
    fn tally(&mut self, stat: f64, observed: f64, observed_partition: bool) {
        self.total += 1;
        if stat <= observed {
            self.le += 1;
        }
        if !observed_partition {
            if stat > observed {
                self.higher += 1;
            } else if stat < observed {
                self.lower += 1;
            } else {
                self.ties += 1;
            }
        }
    }

    fn merge(a: Counts, b: Counts) -> Counts {
        Counts {
            total: a.total + b.total,
            le: a.le + b.le,
            higher: a.higher + b.higher,
            lower: a.lower + b.lower,
            ties: a.ties + b.ties,
        }
    }
}

/// Cross-average evaluator using precomputed row sums: the cross sum of a
/// subset S is Σ_{i∈S} rowsum(i) − 2·(within-S sum), so each statistic
/// costs O(|S|²) lookups instead of O(|S|·n).
struct StatEngine<'a> {
    dmat: &'a DistanceMatrix,
    row_sums: Vec<f64>,
    pairs: f64,
}

impl<'a> StatEngine<'a> {
    fn new(dmat: &'a DistanceMatrix, k: usize) -> StatEngine<'a> {
        let n = dmat.len();
        let row_sums = (0..n)
            .map(|i| (0..n).map(|j| dmat.get(i, j)).sum())
            .collect();
        StatEngine {
            dmat,
            row_sums,
            pairs: (k * (n - k)) as f64,
        }
    }

    fn statistic(&self, subset: &[usize]) -> f64 {
        let mut total = 0.0;
        for &i in subset {
            total += self.row_sums[i];
        }
        let mut within = 0.0;
        for (x, &i) in subset.iter().enumerate() {
            for &j in &subset[x + 1..] {
                within += self.dmat.get(i, j);
            }
        }
        (total - 2.0 * within) / self.pairs
    }
}

/// C(n, k), saturating far above any realistic permutation budget.
fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        match result.checked_mul((n - k + i + 1) as u128) {
            Some(r) => result = r / (i + 1) as u128,
            None => return u128::MAX,
        }
    }
    result
}

/// Visit every k-subset of {0..n} in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Rightmost index that can still advance.
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
