use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{ensure_same_n, Result};
use crate::geometry::{check_weight, closeness, PsdPoint};

/// A monotone, contiguous warping path from `(0, 0)` to `(N₁, N₂)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentPath {
    pub steps: Vec<(usize, usize)>,
    pub total_cost: f64,
    /// `total_cost / steps.len()`.
    pub normalized_cost: f64,
}

/// Dynamic time warping of two point sequences under an arbitrary ground
/// cost, with steps `(1,0)`, `(0,1)`, `(1,1)`.
///
/// Ties on backtracking prefer the diagonal, then `(i-1, j)`, then `(i, j-1)`.
pub fn dtw_align_with<F>(a: &[PsdPoint], b: &[PsdPoint], mut cost: F) -> Result<AlignmentPath>
where
    F: FnMut(&PsdPoint, &PsdPoint) -> Result<f64>,
{
    let (rows, cols) = (a.len(), b.len());
    if rows == 0 || cols == 0 {
        return Err(crate::Error::EmptySequence);
    }
    ensure_same_n(a[0].n(), b[0].n())?;
    let mut acc = vec![f64::INFINITY; rows * cols];
    let at = |i: usize, j: usize| i * cols + j;
    for i in 0..rows {
        for j in 0..cols {
            let c = cost(&a[i], &b[j])?;
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut m = f64::INFINITY;
                if i > 0 && j > 0 {
                    m = acc[at(i - 1, j - 1)];
                }
                if i > 0 {
                    m = m.min(acc[at(i - 1, j)]);
                }
                if j > 0 {
                    m = m.min(acc[at(i, j - 1)]);
                }
                m
            };
            acc[at(i, j)] = if i == 0 && j == 0 { c } else { best + c };
        }
    }

    let (mut i, mut j) = (rows - 1, cols - 1);
    let mut steps = vec![(i, j)];
    while i > 0 || j > 0 {
        let mut next = None;
        let mut best = f64::INFINITY;
        for cand in [
            (i > 0 && j > 0).then(|| (i - 1, j - 1)),
            (i > 0).then(|| (i - 1, j)),
            (j > 0).then(|| (i, j - 1)),
        ]
        .into_iter()
        .flatten()
        {
            let v = acc[at(cand.0, cand.1)];
            if v < best || next.is_none() {
                best = v;
                next = Some(cand);
            }
        }
        (i, j) = next.expect("a predecessor exists off the origin");
        steps.push((i, j));
    }
    steps.reverse();

    let total_cost = acc[at(rows - 1, cols - 1)];
    let normalized_cost = total_cost / steps.len() as f64;
    Ok(AlignmentPath {
        steps,
        total_cost,
        normalized_cost,
    })
}

/// DTW alignment under the closeness with weight `k`.
pub fn dtw_align(a: &Trajectory, b: &Trajectory, k: f64) -> Result<AlignmentPath> {
    check_weight(k)?;
    dtw_align_with(a.points(), b.points(), |p, q| closeness(p, q, k))
}

/// Path-length normalized DTW cost under the closeness.
pub fn dtw_distance(a: &Trajectory, b: &Trajectory, k: f64) -> Result<f64> {
    Ok(dtw_align(a, b, k)?.normalized_cost)
}
