//! Optimal assignment on a square cost matrix.
//!
//! Shortest-augmenting-path formulation with dual potentials, O(n^3).

use ndarray::Array2;

/// Minimum-cost perfect matching of a square cost matrix.
/// Returns `assignment[row] = col` and the total cost.
pub fn min_cost_assignment(cost: &Array2<f64>) -> (Vec<usize>, f64) {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "cost matrix must be square");
    if n == 0 {
        return (Vec::new(), 0.0);
    }

    // 1-based arrays; p[j] is the row matched to column j, p[0] holds the
    // row currently being inserted.
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut p = vec![0_usize; n + 1];
    let mut way = vec![0_usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0_usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // augment along the recorded path
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0_usize; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    let total = (0..n).map(|r| cost[[r, row_to_col[r]]]).sum();
    (row_to_col, total)
}

/// Maximum-sum perfect matching; negates the input and delegates to
/// [`min_cost_assignment`].
pub fn max_sum_assignment(profit: &Array2<f64>) -> (Vec<usize>, f64) {
    let neg = profit.mapv(|v| -v);
    let (assignment, cost) = min_cost_assignment(&neg);
    (assignment, -cost)
}
