//! Time-ordered curves on S⁺(2,n): construction from landmark frames,
//! rate-invariant comparison by dynamic time warping, and adaptive
//! re-sampling along pseudo-geodesics.

mod dtw;
mod metric;
mod resample;

pub use dtw::{dtw_align, dtw_align_with, dtw_distance, AlignmentPath};
pub use metric::{lockstep_distance, uniform_resample, Alignment, FrameMetric, TrajectoryMetric};
pub use resample::{frame_distance_profile, resample, ResampleThresholds};

use nalgebra::MatrixXx2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_from_landmarks, PsdPoint};

/// A sequence of at least two points of S⁺(2,n) sharing the same n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrajectory")]
pub struct Trajectory {
    points: Vec<PsdPoint>,
    id: Option<String>,
    label: Option<String>,
}

#[derive(Deserialize)]
struct RawTrajectory {
    points: Vec<PsdPoint>,
    id: Option<String>,
    label: Option<String>,
}

impl TryFrom<RawTrajectory> for Trajectory {
    type Error = Error;
    fn try_from(raw: RawTrajectory) -> Result<Self> {
        Trajectory::new(raw.points, raw.id, raw.label)
    }
}

impl Trajectory {
    pub fn new(points: Vec<PsdPoint>, id: Option<String>, label: Option<String>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::EmptySequence);
        }
        let n = points[0].n();
        if let Some(p) = points.iter().find(|p| p.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.n(),
            });
        }
        Ok(Trajectory { points, id, label })
    }

    pub fn points(&self) -> &[PsdPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of landmarks.
    pub fn n(&self) -> usize {
        self.points[0].n()
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: Option<String>) -> Self {
        self.label = label;
        self
    }

    pub(crate) fn with_points(&self, points: Vec<PsdPoint>) -> Result<Self> {
        Trajectory::new(points, self.id.clone(), self.label.clone())
    }
}

/// One point per raw frame, in order. Frames are centered here.
pub fn build_trajectory(
    frames: &[MatrixXx2<f64>],
    id: Option<String>,
    label: Option<String>,
) -> Result<Trajectory> {
    if frames.len() < 2 {
        return Err(Error::EmptySequence);
    }
    let points = frames
        .iter()
        .enumerate()
        .map(|(index, f)| {
            point_from_landmarks(f).map_err(|e| Error::DegenerateFrame {
                index,
                reason: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(points, id, label)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::geometry::pseudo_geodesic;
    use nalgebra::Matrix2;
    use rand::Rng;

    pub fn random_frames(rng: &mut impl Rng, n: usize, len: usize) -> Vec<MatrixXx2<f64>> {
        (0..len)
            .map(|_| MatrixXx2::from_fn(n, |_, _| rng.random_range(-1.0..1.0)))
            .collect()
    }

    pub fn random_trajectory(rng: &mut impl Rng, n: usize, len: usize) -> Trajectory {
        build_trajectory(&random_frames(rng, n, len), None, None).unwrap()
    }

    /// A smooth trajectory: a random walk of small landmark perturbations.
    pub fn smooth_trajectory(rng: &mut impl Rng, n: usize, len: usize, step: f64) -> Trajectory {
        let mut z = MatrixXx2::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let mut frames = Vec::with_capacity(len);
        for _ in 0..len {
            frames.push(z.clone());
            z += MatrixXx2::from_fn(n, |_, _| rng.random_range(-step..step));
        }
        build_trajectory(&frames, None, None).unwrap()
    }

    pub fn rigidly_moved(frames: &[MatrixXx2<f64>], rng: &mut impl Rng) -> Vec<MatrixXx2<f64>> {
        frames
            .iter()
            .map(|f| {
                let (s, c) = rng.random_range(-3.0..3.0f64).sin_cos();
                let o = if rng.random_bool(0.5) {
                    Matrix2::new(c, -s, s, c)
                } else {
                    Matrix2::new(c, s, s, -c)
                };
                let (tx, ty) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                let mut g = f * o;
                for mut row in g.row_iter_mut() {
                    row[0] += tx;
                    row[1] += ty;
                }
                g
            })
            .collect()
    }

    pub fn geodesic_samples(a: &PsdPoint, b: &PsdPoint, count: usize) -> Trajectory {
        let points = (0..count)
            .map(|j| pseudo_geodesic(a, b, j as f64 / (count - 1) as f64).unwrap())
            .collect();
        Trajectory::new(points, None, None).unwrap()
    }
}
