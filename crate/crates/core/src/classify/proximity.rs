use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_n, Error, Result};
use crate::trajectory::{dtw_distance, Trajectory, TrajectoryMetric};

/// Symmetric matrix of pairwise trajectory dissimilarities with zero
/// diagonal, rows in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityMatrix {
    m: usize,
    values: Vec<f64>,
    ids: Vec<String>,
}

impl ProximityMatrix {
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    /// Trajectory ids, or the row index when a trajectory has none.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }
}

/// `d_DTW(a, b)` under the closeness with weight `k`.
pub fn proximity(a: &Trajectory, b: &Trajectory, k: f64) -> Result<f64> {
    dtw_distance(a, b, k)
}

fn check_same_n<'a>(mut set: impl Iterator<Item = &'a Trajectory>, n: usize) -> Result<()> {
    set.try_for_each(|t| ensure_same_n(n, t.n()))
}

/// Evaluates `metric` on every listed pair in parallel; results keep the
/// order of `pairs`.
pub(crate) fn pairwise(
    left: &[Trajectory],
    right: &[Trajectory],
    pairs: &[(usize, usize)],
    metric: &TrajectoryMetric,
) -> Result<Vec<f64>> {
    pairs
        .par_iter()
        .map(|&(i, j)| metric.distance(&left[i], &right[j]))
        .collect()
}

/// All pairwise dissimilarities of `set`. Only the upper triangle is
/// computed; the result does not depend on the worker count.
pub fn proximity_matrix(set: &[Trajectory], metric: &TrajectoryMetric) -> Result<ProximityMatrix> {
    if set.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "proximity matrix needs at least 2 trajectories, got {}",
            set.len()
        )));
    }
    metric.frame.validate()?;
    check_same_n(set.iter(), set[0].n())?;
    let m = set.len();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let upper = pairwise(set, set, &pairs, metric)?;
    let mut values = vec![0.0; m * m];
    for (&(i, j), &d) in pairs.iter().zip(&upper) {
        values[i * m + j] = d;
        values[j * m + i] = d;
    }
    let ids = set
        .iter()
        .enumerate()
        .map(|(i, t)| t.id().map_or_else(|| i.to_string(), str::to_string))
        .collect();
    Ok(ProximityMatrix { m, values, ids })
}

/// Dissimilarities from `x` to every reference.
pub fn embed(x: &Trajectory, refs: &[Trajectory], metric: &TrajectoryMetric) -> Result<Vec<f64>> {
    Ok(embed_all(std::slice::from_ref(x), refs, metric)?
        .pop()
        .expect("one row"))
}

/// One embedding row per element of `xs`, computed in parallel.
pub fn embed_all(
    xs: &[Trajectory],
    refs: &[Trajectory],
    metric: &TrajectoryMetric,
) -> Result<Vec<Vec<f64>>> {
    metric.frame.validate()?;
    if let Some(first) = refs.first() {
        check_same_n(xs.iter().chain(refs), first.n())?;
    }
    let m = refs.len();
    let pairs: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .collect();
    let flat = pairwise(xs, refs, &pairs, metric)?;
    Ok(flat
        .chunks(m.max(1))
        .take(xs.len())
        .map(<[f64]>::to_vec)
        .collect())
}
