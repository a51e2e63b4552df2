//! Exact minimum-cost assignment (Hungarian algorithm with potentials).
//!
//! The shortest-augmenting-path formulation runs in O(k³) for a dense k×k
//! cost matrix. All arithmetic is addition and subtraction, so inputs that
//! are exact multiples of 0.5 (as diagram distances are) yield an exact
//! optimum with no rounding.

/// Dense square cost matrix, row-major.
pub struct CostMatrix {
    size: usize,
    costs: Vec<f64>,
}

impl CostMatrix {
    pub fn new(size: usize, costs: Vec<f64>) -> CostMatrix {
        assert_eq!(costs.len(), size * size, "cost matrix must be square");
        CostMatrix { size, costs }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        self.costs[row * self.size + col]
    }
}

/// Minimum-total-cost perfect assignment. Returns the total and, for each
/// row, the column it is assigned to.
pub fn min_cost_assignment(cost: &CostMatrix) -> (f64, Vec<usize>) {
    let n = cost.size();
    if n == 0 {
        return (0.0, Vec::new());
    }
    // 1-indexed arrays; index 0 is the virtual start column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        // Walk the alternating path back, flipping assignments.
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; n];
    let mut total = 0.0;
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
        total += cost.at(row_of_col[j] - 1, j - 1);
    }
    (total, col_of_row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute_force(n: usize, cost: &CostMatrix) -> f64 {
        fn recurse(cost: &CostMatrix, row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
            if row == cost.size() {
                *best = best.min(acc);
                return;
            }
            for col in 0..cost.size() {
                if !used[col] {
                    used[col] = true;
                    recurse(cost, row + 1, used, acc + cost.at(row, col), best);
                    used[col] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        recurse(cost, 0, &mut vec![false; n], 0.0, &mut best);
        best
    }

    #[test]
    fn identity_matrix_prefers_zero_diagonal() {
        let cost = CostMatrix::new(3, vec![0.0, 9.0, 9.0, 9.0, 0.0, 9.0, 9.0, 9.0, 0.0]);
        let (total, cols) = min_cost_assignment(&cost);
        assert_eq!(total, 0.0);
        assert_eq!(cols, vec![0, 1, 2]);
    }

    #[test]
    fn forced_off_diagonal() {
        let cost = CostMatrix::new(2, vec![10.0, 1.0, 1.0, 10.0]);
        let (total, cols) = min_cost_assignment(&cost);
        assert_eq!(total, 2.0);
        assert_eq!(cols, vec![1, 0]);
    }

    #[test]
    fn empty_matrix() {
        let (total, cols) = min_cost_assignment(&CostMatrix::new(0, vec![]));
        assert_eq!(total, 0.0);
        assert!(cols.is_empty());
    }

    #[test]
    fn matches_brute_force_on_random_half_integer_costs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(1..=6usize);
            let costs: Vec<f64> = (0..n * n)
                .map(|_| rng.random_range(0..100) as f64 / 2.0)
                .collect();
            let cost = CostMatrix::new(n, costs);
            let (total, cols) = min_cost_assignment(&cost);
            assert_eq!(total, brute_force(n, &cost), "n={n}");
            // The reported assignment must be a permutation realizing the total.
            let mut seen = vec![false; n];
            let mut realized = 0.0;
            for (row, &col) in cols.iter().enumerate() {
                assert!(!seen[col]);
                seen[col] = true;
                realized += cost.at(row, col);
            }
            assert_eq!(realized, total);
        }
    }

    #[test]
    fn large_penalty_cells_are_avoided_when_possible() {
        let big = (1u64 << 30) as f64;
        let cost = CostMatrix::new(2, vec![big, 3.0, 4.0, big]);
        let (total, _) = min_cost_assignment(&cost);
        assert_eq!(total, 7.0);
    }
}
