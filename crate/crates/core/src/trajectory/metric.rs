use serde::{Deserialize, Serialize};

use super::dtw::dtw_align_with;
use super::Trajectory;
use crate::error::{ensure_same_n, Error, Result};
use crate::geometry::{
    check_weight, closeness, default_epsilon, flat_distance, pseudo_geodesic,
    regularized_spd_distance, PsdPoint,
};

/// Ground cost between two frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrameMetric {
    /// Closeness on S⁺(2,n) with covariance weight `k`.
    Closeness { k: f64 },
    /// Frobenius distance between Gram matrices.
    Flat,
    /// Affine-invariant distance between `G + εI`; `None` picks ε per pair.
    SpdRegularized { epsilon: Option<f64> },
}

impl FrameMetric {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FrameMetric::Closeness { k } => check_weight(k),
            FrameMetric::Flat => Ok(()),
            FrameMetric::SpdRegularized { epsilon: Some(e) } if !(e > 0.0 && e.is_finite()) => Err(
                Error::InvalidParameter(format!("epsilon = {e} must be > 0")),
            ),
            FrameMetric::SpdRegularized { .. } => Ok(()),
        }
    }

    pub fn cost(&self, a: &PsdPoint, b: &PsdPoint) -> Result<f64> {
        match *self {
            FrameMetric::Closeness { k } => closeness(a, b, k),
            FrameMetric::Flat => flat_distance(a, b),
            FrameMetric::SpdRegularized { epsilon } => {
                let eps = epsilon.unwrap_or_else(|| default_epsilon(a, b));
                regularized_spd_distance(a, b, eps)
            }
        }
    }
}

/// How two trajectories are put in temporal correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alignment {
    /// Dynamic time warping, path-length normalized.
    Dtw,
    /// Both curves resampled uniformly to a common length, frames compared
    /// index by index.
    Lockstep,
}

/// Dissimilarity between trajectories: a frame cost and an alignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetric {
    pub frame: FrameMetric,
    pub alignment: Alignment,
}

impl TrajectoryMetric {
    pub fn closeness_dtw(k: f64) -> Self {
        TrajectoryMetric {
            frame: FrameMetric::Closeness { k },
            alignment: Alignment::Dtw,
        }
    }

    /// Exactly zero for trajectories with identical points.
    pub fn distance(&self, a: &Trajectory, b: &Trajectory) -> Result<f64> {
        self.frame.validate()?;
        if a.points() == b.points() {
            return Ok(0.0);
        }
        match self.alignment {
            Alignment::Dtw => {
                Ok(
                    dtw_align_with(a.points(), b.points(), |p, q| self.frame.cost(p, q))?
                        .normalized_cost,
                )
            }
            Alignment::Lockstep => lockstep_distance(a, b, |p, q| self.frame.cost(p, q)),
        }
    }
}

/// `len` points at equally spaced times along the piecewise pseudo-geodesic
/// curve through the frames of `a` (frame i sits at time i / (N)).
pub fn uniform_resample(a: &Trajectory, len: usize) -> Result<Vec<PsdPoint>> {
    if len < 2 {
        return Err(Error::InvalidParameter(format!(
            "resample length {len} < 2"
        )));
    }
    let pts = a.points();
    if len == pts.len() {
        return Ok(pts.to_vec());
    }
    let segments = pts.len() - 1;
    (0..len)
        .map(|j| {
            // Exact rational position j·N/(len-1) = i + r/(len-1).
            let num = j * segments;
            let (i, r) = (num / (len - 1), num % (len - 1));
            if r == 0 {
                Ok(pts[i].clone())
            } else {
                pseudo_geodesic(&pts[i], &pts[i + 1], r as f64 / (len - 1) as f64)
            }
        })
        .collect()
}

/// Mean frame cost after resampling both trajectories to the longer length.
pub fn lockstep_distance<F>(a: &Trajectory, b: &Trajectory, mut cost: F) -> Result<f64>
where
    F: FnMut(&PsdPoint, &PsdPoint) -> Result<f64>,
{
    ensure_same_n(a.n(), b.n())?;
    let len = a.len().max(b.len());
    let ra = uniform_resample(a, len)?;
    let rb = uniform_resample(b, len)?;
    let mut sum = 0.0;
    for (p, q) in ra.iter().zip(&rb) {
        sum += cost(p, q)?;
    }
    Ok(sum / len as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::dtw_distance;
    use crate::trajectory::test_support::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closeness_dtw_matches_dtw_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let a = random_trajectory(&mut rng, 5, 6);
        let b = random_trajectory(&mut rng, 5, 4);
        let m = TrajectoryMetric::closeness_dtw(0.2);
        assert_eq!(
            m.distance(&a, &b).unwrap(),
            dtw_distance(&a, &b, 0.2).unwrap()
        );
    }

    #[test]
    fn uniform_resample_keeps_endpoints_and_knots() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let a = random_trajectory(&mut rng, 5, 4);
        let r = uniform_resample(&a, 7).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r[0], a.points()[0]);
        assert_eq!(r[6], a.points()[3]);
        // 7 samples over 3 segments: j = 2 sits exactly on frame 1.
        assert_eq!(r[2], a.points()[1]);
        assert_eq!(uniform_resample(&a, 4).unwrap(), a.points().to_vec());
    }

    #[test]
    fn lockstep_is_zero_on_self_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let a = random_trajectory(&mut rng, 5, 5);
        let b = random_trajectory(&mut rng, 5, 8);
        let m = TrajectoryMetric {
            frame: FrameMetric::Closeness { k: 0.1 },
            alignment: Alignment::Lockstep,
        };
        assert!(m.distance(&a, &a).unwrap() < 1e-20);
        assert!((m.distance(&a, &b).unwrap() - m.distance(&b, &a).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn lockstep_is_sensitive_to_timing_where_dtw_is_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let a = smooth_trajectory(&mut rng, 6, 6, 0.2);
        let mut pts = a.points().to_vec();
        let first = pts[0].clone();
        for _ in 0..6 {
            pts.insert(0, first.clone());
        }
        let delayed = Trajectory::new(pts, None, None).unwrap();
        let dtw = TrajectoryMetric::closeness_dtw(0.1);
        let lock = TrajectoryMetric {
            alignment: Alignment::Lockstep,
            ..dtw
        };
        assert!(dtw.distance(&a, &delayed).unwrap() < 1e-20);
        assert!(lock.distance(&a, &delayed).unwrap() > 1e-4);
    }

    #[test]
    fn baseline_frame_metrics_are_zero_on_self() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let a = random_trajectory(&mut rng, 6, 4);
        for frame in [
            FrameMetric::Flat,
            FrameMetric::SpdRegularized { epsilon: None },
        ] {
            let m = TrajectoryMetric {
                frame,
                alignment: Alignment::Dtw,
            };
            assert!(m.distance(&a, &a).unwrap() < 1e-6);
        }
        assert!(FrameMetric::SpdRegularized { epsilon: Some(0.0) }
            .validate()
            .is_err());
        assert!(FrameMetric::Closeness { k: -1.0 }.validate().is_err());
    }
}
