//! Centered planar landmark configurations and their Euclidean-invariant
//! summaries: Gram matrix, augmented squared-distance matrix, covariance.

use nalgebra::{DMatrix, Matrix2, MatrixXx2};

use super::spd::Spd2;
use crate::error::{Error, Result};

/// Smallest admissible ratio σ_min / σ_max of a configuration.
pub const RANK_TOL: f64 = 1e-8;

/// A centered n×2 landmark matrix of rank 2.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkConfig {
    points: MatrixXx2<f64>,
}

impl LandmarkConfig {
    pub fn points(&self) -> &MatrixXx2<f64> {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn into_inner(self) -> MatrixXx2<f64> {
        self.points
    }
}

/// Builds an n×2 matrix from `[x, y]` rows.
pub fn matrix_from_rows(rows: &[[f64; 2]]) -> MatrixXx2<f64> {
    MatrixXx2::from_fn(rows.len(), |i, j| rows[i][j])
}

/// Singular values of an n×2 matrix, descending.
pub(crate) fn singular_values(z: &MatrixXx2<f64>) -> (f64, f64) {
    let sv = z.clone().svd(false, false).singular_values;
    (sv[0].max(sv[1]), sv[0].min(sv[1]))
}

/// Subtracts the center of mass and checks that the result has rank 2.
pub fn center_landmarks(raw: &MatrixXx2<f64>) -> Result<LandmarkConfig> {
    let n = raw.nrows();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 landmarks, got {n}"
        )));
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite landmark coordinate".into()));
    }
    let mean = raw.row_mean();
    let mut points = raw.clone();
    for mut row in points.row_iter_mut() {
        row -= &mean;
    }
    let (hi, lo) = singular_values(&points);
    if !(hi > 0.0) || lo < RANK_TOL * hi {
        return Err(Error::DegenerateConfiguration(format!(
            "singular values {hi:e} and {lo:e} (collinear or coincident landmarks)"
        )));
    }
    Ok(LandmarkConfig { points })
}

/// `G = Z Zᵀ`, the pairwise inner products of the landmarks.
pub fn gram(z: &LandmarkConfig) -> DMatrix<f64> {
    let p = &z.points;
    let g = p * p.transpose();
    DMatrix::from_fn(z.n(), z.n(), |i, j| g[(i, j)])
}

/// Augmented (n+1)×(n+1) squared-distance matrix. Index 0 is the center of
/// mass (the origin), indices 1..=n are the landmarks.
pub fn squared_distance_matrix(z: &LandmarkConfig) -> DMatrix<f64> {
    let n = z.n();
    let p = &z.points;
    let point = |i: usize| -> [f64; 2] {
        if i == 0 {
            [0.0, 0.0]
        } else {
            [p[(i - 1, 0)], p[(i - 1, 1)]]
        }
    };
    DMatrix::from_fn(n + 1, n + 1, |i, j| {
        let (a, b) = (point(i), point(j));
        (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
    })
}

/// Reads the augmented squared-distance matrix off a Gram matrix via
/// `D_ij = G_ii - 2 G_ij + G_jj`, with the origin at index 0.
pub fn squared_distances_from_gram(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let inner = |i: usize, j: usize| -> f64 {
        if i == 0 || j == 0 {
            0.0
        } else {
            g[(i - 1, j - 1)]
        }
    };
    DMatrix::from_fn(n + 1, n + 1, |i, j| {
        if i == j {
            0.0
        } else {
            inner(i, i) - 2.0 * inner(i, j) + inner(j, j)
        }
    })
}

/// Spatial covariance `ZᵀZ / (n-1)`.
pub fn covariance(z: &LandmarkConfig) -> Spd2 {
    let p = &z.points;
    let ztz: Matrix2<f64> = p.transpose() * p;
    Spd2::from_trusted(ztz / (z.n() as f64 - 1.0))
}
