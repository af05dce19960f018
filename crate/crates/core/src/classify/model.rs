use serde::{Deserialize, Serialize};

use super::proximity::{embed, proximity_matrix};
use super::svm::{train_binary, LinearSvm, SolverInfo};
use crate::error::{Error, Result};
use crate::trajectory::{Trajectory, TrajectoryMetric};

/// Standard deviations below this are treated as 1.
const MIN_SCALE: f64 = 1e-12;

/// Class list in order of first appearance and the class index of every
/// trajectory. Every trajectory must be labeled.
pub fn class_index(set: &[Trajectory]) -> Result<(Vec<String>, Vec<usize>)> {
    let mut classes: Vec<String> = Vec::new();
    let mut idx = Vec::with_capacity(set.len());
    for (i, t) in set.iter().enumerate() {
        let label = t.label().ok_or_else(|| {
            Error::InvalidInput(format!(
                "trajectory {} has no label",
                t.id().map_or_else(|| i.to_string(), str::to_string)
            ))
        })?;
        let c = match classes.iter().position(|c| c == label) {
            Some(c) => c,
            None => {
                classes.push(label.to_string());
                classes.len() - 1
            }
        };
        idx.push(c);
    }
    Ok((classes, idx))
}

/// Per-feature affine map to zero mean and unit population variance,
/// fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let m = rows.len().max(1) as f64;
        let mean: Vec<f64> = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m)
            .collect();
        let scale = (0..d)
            .map(|j| {
                let var = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / m;
                let sd = var.sqrt();
                if sd < MIN_SCALE {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// Standardization plus one binary SVM per class (class vs rest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsRest {
    pub standardizer: Standardizer,
    pub machines: Vec<LinearSvm>,
    pub solver: Vec<SolverInfo>,
}

impl OneVsRest {
    /// `labels[i]` indexes `0..classes`. Class `c` is trained with seed
    /// `seed + c`.
    pub fn fit(
        rows: &[Vec<f64>],
        labels: &[usize],
        classes: usize,
        c: f64,
        seed: u64,
    ) -> Result<Self> {
        let standardizer = Standardizer::fit(rows);
        let x: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.apply(r)).collect();
        let mut machines = Vec::with_capacity(classes);
        let mut solver = Vec::with_capacity(classes);
        for class in 0..classes {
            let y: Vec<f64> = labels
                .iter()
                .map(|&l| if l == class { 1.0 } else { -1.0 })
                .collect();
            let (svm, info) = train_binary(&x, &y, c, seed.wrapping_add(class as u64))?;
            machines.push(svm);
            solver.push(info);
        }
        Ok(OneVsRest {
            standardizer,
            machines,
            solver,
        })
    }

    pub fn scores(&self, row: &[f64]) -> Vec<f64> {
        let x = self.standardizer.apply(row);
        self.machines.iter().map(|svm| svm.decision(&x)).collect()
    }
}

/// Index of the largest score; the earliest class wins ties.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// A predicted label with one score per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub scores: Vec<f64>,
}

/// Pairwise-proximity-function SVM: a trajectory is represented by its
/// dissimilarities to all training trajectories, which the model keeps as
/// references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpfSvmModel {
    pub classes: Vec<String>,
    pub references: Vec<Trajectory>,
    pub metric: TrajectoryMetric,
    pub c: f64,
    pub seed: u64,
    pub ovr: OneVsRest,
}

/// Trains on the proximity matrix of the labeled `set`.
pub fn train_ppfsvm(
    set: &[Trajectory],
    metric: &TrajectoryMetric,
    c: f64,
    seed: u64,
) -> Result<PpfSvmModel> {
    let (classes, labels) = class_index(set)?;
    if classes.len() < 2 {
        return Err(Error::InsufficientClasses(classes.len()));
    }
    let prox = proximity_matrix(set, metric)?;
    let rows: Vec<Vec<f64>> = (0..prox.len()).map(|i| prox.row(i).to_vec()).collect();
    let ovr = OneVsRest::fit(&rows, &labels, classes.len(), c, seed)?;
    Ok(PpfSvmModel {
        classes,
        references: set.to_vec(),
        metric: *metric,
        c,
        seed,
        ovr,
    })
}

impl PpfSvmModel {
    pub fn predict_embedded(&self, phi: &[f64]) -> Result<Prediction> {
        if phi.len() != self.references.len() {
            return Err(Error::DimensionMismatch {
                expected: self.references.len(),
                found: phi.len(),
            });
        }
        let scores = self.ovr.scores(phi);
        Ok(Prediction {
            label: self.classes[argmax(&scores)].clone(),
            scores,
        })
    }

    pub fn predict(&self, x: &Trajectory) -> Result<Prediction> {
        self.predict_embedded(&embed(x, &self.references, &self.metric)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::test_support::{random_trajectory, smooth_trajectory};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two classes: small random walks around two distinct base shapes.
    fn two_clusters(seed: u64, per: usize) -> Vec<Trajectory> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bases = [
            random_trajectory(&mut rng, 6, 2),
            random_trajectory(&mut rng, 6, 2),
        ];
        let mut out = Vec::new();
        for i in 0..2 * per {
            let class = i % 2;
            let wobble = smooth_trajectory(&mut rng, 6, 5, 0.02);
            let base = &bases[class].points()[0];
            let pts = wobble
                .points()
                .iter()
                .map(|p| crate::geometry::pseudo_geodesic(base, p, 0.05).unwrap())
                .collect();
            let t = Trajectory::new(pts, Some(format!("t{i}")), Some(["a", "b"][class].into()))
                .unwrap();
            out.push(t);
        }
        out
    }

    #[test]
    fn standardizer_population_statistics() {
        let rows = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = Standardizer::fit(&rows);
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.scale, vec![1.0, 1.0]);
        assert_eq!(s.apply(&[3.0, 5.0]), vec![1.0, 0.0]);
        let s = Standardizer::fit(&[vec![0.0], vec![4.0]]);
        assert_eq!(s.scale, vec![2.0]);
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[2.0, 2.0]), 0);
    }

    #[test]
    fn separable_training_set_is_fit() {
        let set = two_clusters(1, 6);
        let metric = TrajectoryMetric::closeness_dtw(0.1);
        let model = train_ppfsvm(&set, &metric, 1.0, 0).unwrap();
        assert_eq!(model.ovr.machines[0].weights.len(), set.len());
        for info in &model.ovr.solver {
            assert!(info.converged);
            assert!(info.hinge_loss <= 1e-4, "{info:?}");
        }
        for t in &set {
            let p = model.predict(t).unwrap();
            assert_eq!(p.scores.len(), 2);
            assert_eq!(Some(p.label.as_str()), t.label());
        }
    }

    #[test]
    fn duplicated_training_set_gives_same_decisions() {
        let set = two_clusters(2, 4);
        let metric = TrajectoryMetric::closeness_dtw(0.1);
        let a = train_ppfsvm(&set, &metric, 1.0, 3).unwrap();
        let b = train_ppfsvm(&set.clone(), &metric, 1.0, 3).unwrap();
        let probe = &two_clusters(9, 1)[0];
        let (pa, pb) = (a.predict(probe).unwrap(), b.predict(probe).unwrap());
        for (x, y) in pa.scores.iter().zip(&pb.scores) {
            assert!((x - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn relabeling_permutes_outputs() {
        let set = two_clusters(3, 5);
        let metric = TrajectoryMetric::closeness_dtw(0.1);
        let model = train_ppfsvm(&set, &metric, 1.0, 0).unwrap();
        let renamed: Vec<_> = set
            .iter()
            .map(|t| {
                let l = if t.label() == Some("a") {
                    "zeta"
                } else {
                    "alpha"
                };
                t.clone().with_label(Some(l.into()))
            })
            .collect();
        let other = train_ppfsvm(&renamed, &metric, 1.0, 0).unwrap();
        for probe in two_clusters(11, 3) {
            let (p, q) = (
                model.predict(&probe).unwrap(),
                other.predict(&probe).unwrap(),
            );
            assert_eq!(p.scores, q.scores);
            assert_eq!(p.label == "a", q.label == "zeta");
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let set: Vec<_> = two_clusters(4, 2)
            .into_iter()
            .map(|t| t.with_label(Some("only".into())))
            .collect();
        let metric = TrajectoryMetric::closeness_dtw(0.1);
        assert_eq!(
            train_ppfsvm(&set, &metric, 1.0, 0),
            Err(Error::InsufficientClasses(1))
        );
        let unlabeled = vec![set[0].clone().with_label(None), set[1].clone()];
        assert!(matches!(
            train_ppfsvm(&unlabeled, &metric, 1.0, 0),
            Err(Error::InvalidInput(_))
        ));
    }
}
