use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::geometry::{check_weight, closeness, pseudo_geodesic};

/// Closeness thresholds for adaptive re-sampling: frames closer than
/// `zeta1` to the previous kept frame are dropped, gaps wider than `zeta2`
/// are filled with pseudo-geodesic samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleThresholds {
    pub zeta1: f64,
    pub zeta2: f64,
}

impl ResampleThresholds {
    pub const AUTO_LOW: f64 = 0.05;
    pub const AUTO_HIGH: f64 = 2.0;

    pub fn new(zeta1: f64, zeta2: f64) -> Result<Self> {
        if !(zeta1 >= 0.0 && zeta2.is_finite() && zeta1 < zeta2) {
            return Err(Error::InvalidParameter(format!(
                "thresholds must satisfy 0 ≤ ζ₁ < ζ₂, got ζ₁ = {zeta1}, ζ₂ = {zeta2}"
            )));
        }
        Ok(ResampleThresholds { zeta1, zeta2 })
    }

    /// `ζ₁ = 0.05·median`, `ζ₂ = 2·median` of all consecutive closenesses in
    /// `set`.
    pub fn auto<'a>(set: impl IntoIterator<Item = &'a Trajectory>, k: f64) -> Result<Self> {
        let mut gaps = Vec::new();
        for t in set {
            gaps.extend(frame_distance_profile(t, k)?);
        }
        if gaps.is_empty() {
            return Err(Error::InvalidInput(
                "no trajectories to derive thresholds from".into(),
            ));
        }
        gaps.sort_by(f64::total_cmp);
        let mid = gaps.len() / 2;
        let median = if gaps.len() % 2 == 1 {
            gaps[mid]
        } else {
            0.5 * (gaps[mid - 1] + gaps[mid])
        };
        if !(median > 0.0) {
            return Err(Error::InvalidInput(
                "median consecutive closeness is zero; thresholds are undefined".into(),
            ));
        }
        ResampleThresholds::new(Self::AUTO_LOW * median, Self::AUTO_HIGH * median)
    }
}

/// Closeness of every frame to its predecessor.
pub fn frame_distance_profile(a: &Trajectory, k: f64) -> Result<Vec<f64>> {
    a.points()
        .windows(2)
        .map(|w| closeness(&w[0], &w[1], k))
        .collect()
}

/// Number of pseudo-geodesic samples to insert in a gap of closeness `d` so
/// that every sub-gap is at most `zeta2`. Closeness along a pseudo-geodesic
/// scales with the square of the parameter step.
fn insertions(d: f64, zeta2: f64) -> usize {
    if d <= zeta2 {
        return 0;
    }
    // The relative slack absorbs round-off when d/ζ₂ is a perfect square.
    let pieces = ((d / zeta2).sqrt() * (1.0 - 1e-12)).ceil();
    (pieces as usize).saturating_sub(1)
}

/// One left-to-right pass of adaptive re-sampling. The first and last
/// frames are always kept.
pub fn resample(a: &Trajectory, thresholds: ResampleThresholds, k: f64) -> Result<Trajectory> {
    let ResampleThresholds { zeta1, zeta2 } =
        ResampleThresholds::new(thresholds.zeta1, thresholds.zeta2)?;
    check_weight(k)?;
    let pts = a.points();
    let mut out = vec![pts[0].clone()];
    for (idx, p) in pts.iter().enumerate().skip(1) {
        let last = out.last().expect("first frame is kept");
        let d = closeness(last, p, k)?;
        let is_final = idx == pts.len() - 1;
        if d < zeta1 && !is_final {
            continue;
        }
        let m = insertions(d, zeta2);
        if m > 0 {
            let from = last.clone();
            for j in 1..=m {
                out.push(pseudo_geodesic(&from, p, j as f64 / (m + 1) as f64)?);
            }
        }
        out.push(p.clone());
    }
    a.with_points(out)
}
