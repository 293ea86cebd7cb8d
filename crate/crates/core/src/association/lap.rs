//! Gated maximum-weight assignment.
//!
//! Shortest augmenting paths with dual potentials (the Jonker-Volgenant
//! augmentation scheme) on a dense rectangular cost matrix. Gated pairs are
//! given zero weight, so they can never displace an admissible pair, and are
//! dropped from the result.

use nalgebra::DMatrix;

/// Dense `tracks x detections` similarity matrix with an acceptance gate.
#[derive(Debug, Clone)]
pub struct ScoreMatrix {
    pub scores: DMatrix<f64>,
    pub gate: f64,
}

impl ScoreMatrix {
    pub fn new(scores: DMatrix<f64>, gate: f64) -> Self {
        Self { scores, gate }
    }

    pub fn from_rows(rows: &[Vec<f64>], gate: f64) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        Self { scores: DMatrix::from_fn(n, m, |i, j| rows[i][j]), gate }
    }
}

/// Maximum total-score one-to-one matching among pairs with score `>= gate`.
/// Matches come back sorted by track index.
pub fn solve_assignment(m: &ScoreMatrix) -> Vec<(usize, usize)> {
    maximize_assignment(&m.scores, m.gate)
}

/// Same as [`solve_assignment`] for an arbitrary finite, non-negative
/// weight matrix.
pub fn maximize_assignment(w: &DMatrix<f64>, gate: f64) -> Vec<(usize, usize)> {
    let (n, m) = w.shape();
    if n == 0 || m == 0 {
        return Vec::new();
    }
    let allowed = |i: usize, j: usize| w[(i, j)].is_finite() && w[(i, j)] >= gate;
    let transpose = n > m;
    let (rows, cols) = if transpose { (m, n) } else { (n, m) };
    let cost = |r: usize, c: usize| {
        let (i, j) = if transpose { (c, r) } else { (r, c) };
        if allowed(i, j) {
            -w[(i, j)]
        } else {
            0.0
        }
    };
    let col_of_row = shortest_augmenting_path(rows, cols, cost);
    let mut out: Vec<(usize, usize)> = col_of_row
        .into_iter()
        .enumerate()
        .map(|(r, c)| if transpose { (c, r) } else { (r, c) })
        .filter(|&(i, j)| allowed(i, j))
        .collect();
    out.sort_unstable();
    out
}

/// Minimum-cost assignment of every row (`rows <= cols`). Returns the
/// column assigned to each row.
fn shortest_augmenting_path(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    debug_assert!(rows <= cols);
    // 1-based with index 0 as the virtual source column
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut row_of_col = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut min_v = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < min_v[j] {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; rows];
    for j in 1..=cols {
        if row_of_col[j] != 0 {
            col_of_row[row_of_col[j] - 1] = j - 1;
        }
    }
    col_of_row
}
