use serde::{Deserialize, Serialize};

use super::model::{class_index, Prediction};
use super::proximity::embed;
use crate::error::{Error, Result};
use crate::trajectory::{Trajectory, TrajectoryMetric};

fn check_neighbors(neighbors: usize, m: usize) -> Result<()> {
    if neighbors < 1 || neighbors > m {
        return Err(Error::InvalidParameter(format!(
            "K = {neighbors} must lie in 1..={m}"
        )));
    }
    Ok(())
}

/// Majority vote among the `neighbors` smallest distances. Equal distances
/// keep training order; tied votes go to the class with the smallest mean
/// neighbor distance, then to the earlier class. Returns the winning class
/// and the vote share of every class.
pub(crate) fn vote(
    distances: &[f64],
    labels: &[usize],
    classes: usize,
    neighbors: usize,
) -> (usize, Vec<f64>) {
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]));
    let mut votes = vec![0usize; classes];
    let mut sums = vec![0.0; classes];
    for &i in &order[..neighbors] {
        votes[labels[i]] += 1;
        sums[labels[i]] += distances[i];
    }
    let mut best = 0;
    for c in 1..classes {
        let better = votes[c] > votes[best]
            || (votes[c] == votes[best]
                && votes[c] > 0
                && sums[c] / (votes[c] as f64) < sums[best] / (votes[best] as f64));
        if better {
            best = c;
        }
    }
    let shares = votes.iter().map(|&v| v as f64 / neighbors as f64).collect();
    (best, shares)
}

/// k-nearest-neighbor classifier holding its labeled training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub classes: Vec<String>,
    pub references: Vec<Trajectory>,
    pub labels: Vec<usize>,
    pub neighbors: usize,
    pub metric: TrajectoryMetric,
}

impl KnnModel {
    pub fn fit(train: &[Trajectory], neighbors: usize, metric: &TrajectoryMetric) -> Result<Self> {
        let (classes, labels) = class_index(train)?;
        check_neighbors(neighbors, train.len())?;
        metric.frame.validate()?;
        Ok(KnnModel {
            classes,
            references: train.to_vec(),
            labels,
            neighbors,
            metric: *metric,
        })
    }

    pub fn predict_embedded(&self, distances: &[f64]) -> Result<Prediction> {
        if distances.len() != self.references.len() {
            return Err(Error::DimensionMismatch {
                expected: self.references.len(),
                found: distances.len(),
            });
        }
        let (best, scores) = vote(distances, &self.labels, self.classes.len(), self.neighbors);
        Ok(Prediction {
            label: self.classes[best].clone(),
            scores,
        })
    }

    pub fn predict(&self, x: &Trajectory) -> Result<Prediction> {
        self.predict_embedded(&embed(x, &self.references, &self.metric)?)
    }
}

/// Label of `x` by a `neighbors`-NN vote over `train`.
pub fn knn_predict(
    train: &[Trajectory],
    x: &Trajectory,
    neighbors: usize,
    metric: &TrajectoryMetric,
) -> Result<String> {
    Ok(KnnModel::fit(train, neighbors, metric)?.predict(x)?.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::dtw_distance;
    use crate::trajectory::test_support::random_trajectory;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const K: f64 = 0.1;

    fn labeled(seed: u64, m: usize, classes: usize) -> Vec<Trajectory> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|i| {
                let len = rng.random_range(2..6);
                random_trajectory(&mut rng, 5, len).with_label(Some(format!("L{}", i % classes)))
            })
            .collect()
    }

    #[test]
    fn one_neighbor_matches_sort_oracle() {
        let metric = TrajectoryMetric::closeness_dtw(K);
        for seed in 0..5 {
            let train = labeled(seed, 9, 3);
            let probes = labeled(seed + 100, 6, 1);
            for x in &probes {
                let d: Vec<f64> = train
                    .iter()
                    .map(|t| dtw_distance(x, t, K).unwrap())
                    .collect();
                let mut idx: Vec<usize> = (0..d.len()).collect();
                idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap().then(a.cmp(&b)));
                let want = train[idx[0]].label().unwrap();
                assert_eq!(knn_predict(&train, x, 1, &metric).unwrap(), want);
            }
        }
    }

    #[test]
    fn training_sample_gets_its_label() {
        let train = labeled(7, 8, 2);
        let metric = TrajectoryMetric::closeness_dtw(K);
        for t in &train {
            assert_eq!(
                knn_predict(&train, t, 1, &metric).unwrap(),
                t.label().unwrap()
            );
        }
    }

    #[test]
    fn three_neighbors_match_brute_force_vote() {
        let metric = TrajectoryMetric::closeness_dtw(K);
        let train = labeled(8, 12, 3);
        for x in labeled(9, 10, 1) {
            let mut d: Vec<(f64, usize, &str)> = train
                .iter()
                .enumerate()
                .map(|(i, t)| (dtw_distance(&x, t, K).unwrap(), i, t.label().unwrap()))
                .collect();
            d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let mut tally: Vec<(&str, usize, f64)> = Vec::new();
            for &(dist, _, l) in &d[..3] {
                match tally.iter_mut().find(|e| e.0 == l) {
                    Some(e) => {
                        e.1 += 1;
                        e.2 += dist;
                    }
                    None => tally.push((l, 1, dist)),
                }
            }
            let top = tally.iter().map(|e| e.1).max().unwrap();
            let want = tally
                .iter()
                .filter(|e| e.1 == top)
                .min_by(|a, b| (a.2 / a.1 as f64).partial_cmp(&(b.2 / b.1 as f64)).unwrap())
                .unwrap()
                .0;
            assert_eq!(knn_predict(&train, &x, 3, &metric).unwrap(), want);
        }
    }

    #[test]
    fn full_vote_tie_goes_to_nearer_class() {
        // Votes 2 : 2, class b has the smaller mean distance.
        let (class, shares) = vote(&[1.0, 0.5, 3.0, 0.6], &[0, 1, 0, 1], 2, 4);
        assert_eq!(class, 1);
        assert_eq!(shares, vec![0.5, 0.5]);
        // Equal means fall back to class order.
        let (class, _) = vote(&[1.0, 1.0], &[1, 0], 2, 2);
        assert_eq!(class, 0);
        // Distance ties keep training order.
        let (class, _) = vote(&[2.0, 2.0, 2.0], &[1, 0, 0], 2, 1);
        assert_eq!(class, 1);
    }

    #[test]
    fn rejects_bad_neighbor_counts() {
        let train = labeled(10, 4, 2);
        let metric = TrajectoryMetric::closeness_dtw(K);
        for bad in [0, 5] {
            assert!(matches!(
                knn_predict(&train, &train[0], bad, &metric),
                Err(Error::InvalidParameter(_))
            ));
        }
    }
}
