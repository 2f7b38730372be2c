//! Rectangular min-cost assignment.
//!
//! Shortest-augmenting-path Hungarian method with row/column potentials on
//! a zero-padded square matrix, O(n^3). Entries at or above [`FORBIDDEN`]
//! may only be used when no full-size assignment avoids them, and are
//! stripped from the result.

use crate::error::{Error, Result};

/// Cost marking a pair that must never appear in a result.
pub const FORBIDDEN: f64 = 1e9;

/// Dense row-major cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::domain("cost matrix rows differ in length"));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn is_forbidden(&self, i: usize, j: usize) -> bool {
        self.get(i, j) >= FORBIDDEN
    }

    /// Sum of the costs of the given pairs.
    pub fn total(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(i, j)| self.get(i, j)).sum()
    }
}

/// One-to-one matching between rows and columns.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    /// `(row, col)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

impl Assignment {
    fn from_pairs(mut pairs: Vec<(usize, usize)>, rows: usize, cols: usize) -> Self {
        pairs.sort_unstable();
        let mut row_used = vec![false; rows];
        let mut col_used = vec![false; cols];
        for &(i, j) in &pairs {
            row_used[i] = true;
            col_used[j] = true;
        }
        Self {
            pairs,
            unmatched_rows: (0..rows).filter(|&i| !row_used[i]).collect(),
            unmatched_cols: (0..cols).filter(|&j| !col_used[j]).collect(),
        }
    }

    pub fn col_of(&self, row: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == row).map(|p| p.1)
    }
}

struct Solved {
    size: usize,
    padded: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    col_of: Vec<usize>,
    row_of: Vec<usize>,
    eps: f64,
}

impl Solved {
    fn reduced(&self, i: usize, j: usize) -> f64 {
        self.padded[i * self.size + j] - self.u[i + 1] - self.v[j + 1]
    }

    fn tight(&self, i: usize, j: usize) -> bool {
        self.reduced(i, j).abs() <= self.eps
    }
}

fn solve(cost: &CostMatrix) -> Result<Option<Solved>> {
    let (n, m) = (cost.rows, cost.cols);
    if n == 0 || m == 0 {
        return Ok(None);
    }
    if cost.data.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("cost matrix contains non-finite entries"));
    }
    // Forbidden entries get a penalty larger than any spread of allowed
    // totals, which keeps the padded problem well scaled.
    let max_abs = cost
        .data
        .iter()
        .filter(|&&c| c < FORBIDDEN)
        .fold(0.0f64, |a, &c| a.max(c.abs()));
    let k = n.min(m) as f64;
    let penalty = 2.0 * k * max_abs + 1.0;
    let size = n.max(m);
    let mut padded = vec![0.0; size * size];
    for i in 0..n {
        for j in 0..m {
            let c = cost.get(i, j);
            padded[i * size + j] = if c >= FORBIDDEN { penalty } else { c };
        }
    }

    let inf = f64::INFINITY;
    let mut u = vec![0.0; size + 1];
    let mut v = vec![0.0; size + 1];
    let mut p = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=size {
                if used[j] {
                    continue;
                }
                let cur = padded[(i0 - 1) * size + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=size {
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
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of = vec![0usize; size];
    let mut row_of = vec![0usize; size];
    for j in 1..=size {
        col_of[p[j] - 1] = j - 1;
        row_of[j - 1] = p[j] - 1;
    }
    let scale = padded.iter().fold(1.0f64, |a, &c| a.max(c.abs()));
    Ok(Some(Solved {
        size,
        padded,
        u,
        v,
        col_of,
        row_of,
        eps: 1e-9 * scale,
    }))
}

/// Among all optimal assignments (those using only zero-reduced-cost
/// edges), moves to the one whose column sequence in row order is
/// lexicographically smallest, padding columns sorting last.
fn lexicographic_refine(s: &mut Solved) {
    let size = s.size;
    let mut fixed_col = vec![false; size];
    for i in 0..size {
        for j in 0..size {
            if fixed_col[j] || !s.tight(i, j) {
                continue;
            }
            if s.col_of[i] == j {
                fixed_col[j] = true;
                break;
            }
            let freed = s.col_of[i];
            let displaced = s.row_of[j];
            let mut visited = vec![false; size];
            if reroute(s, displaced, j, freed, &fixed_col, &mut visited) {
                s.col_of[i] = j;
                s.row_of[j] = i;
                fixed_col[j] = true;
                break;
            }
        }
    }
}

/// Finds new tight columns for `row` along an alternating path ending at
/// `target`, never touching `banned` or fixed columns. Updates the matching
/// on success.
fn reroute(s: &mut Solved, row: usize, banned: usize, target: usize, fixed_col: &[bool], visited: &mut [bool]) -> bool {
    for c in 0..s.size {
        if c == banned || fixed_col[c] || visited[c] || !s.tight(row, c) {
            continue;
        }
        visited[c] = true;
        let ok = c == target || {
            let next = s.row_of[c];
            reroute(s, next, banned, target, fixed_col, visited)
        };
        if ok {
            s.col_of[row] = c;
            s.row_of[c] = row;
            return true;
        }
    }
    false
}

fn collect(cost: &CostMatrix, s: &Solved) -> Assignment {
    let pairs = (0..cost.rows)
        .filter_map(|i| {
            let j = s.col_of[i];
            (j < cost.cols && !cost.is_forbidden(i, j)).then_some((i, j))
        })
        .collect();
    Assignment::from_pairs(pairs, cost.rows, cost.cols)
}

/// Minimum-cost assignment of size `min(rows, cols)`.
///
/// Forbidden pairs are used only when unavoidable and are then dropped
/// from the result. Among equally cheap assignments the one with the
/// lexicographically smallest pair list is returned.
pub fn hungarian(cost: &CostMatrix) -> Result<Assignment> {
    match solve(cost)? {
        None => Ok(Assignment::from_pairs(Vec::new(), cost.rows, cost.cols)),
        Some(mut s) => {
            lexicographic_refine(&mut s);
            Ok(collect(cost, &s))
        }
    }
}

/// Minimum-cost assignment without the tie-break pass; for large matrices
/// where only the optimal total matters.
pub fn hungarian_unordered(cost: &CostMatrix) -> Result<Assignment> {
    match solve(cost)? {
        None => Ok(Assignment::from_pairs(Vec::new(), cost.rows, cost.cols)),
        Some(s) => Ok(collect(cost, &s)),
    }
}
