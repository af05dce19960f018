//! The cone P₂ of 2×2 symmetric positive definite matrices with its
//! affine-invariant metric.
//!
//! All matrix functions (square root, logarithm, powers) go through a
//! closed-form symmetric 2×2 eigendecomposition.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Eigendecomposition `m = V diag(values) Vᵀ` of a symmetric 2×2 matrix.
///
/// `values` are sorted descending and `vectors` is a rotation.
#[derive(Debug, Clone, Copy)]
pub struct SymEigen2 {
    pub values: Vector2<f64>,
    pub vectors: Matrix2<f64>,
}

impl SymEigen2 {
    /// Reads only the lower triangle of `m`.
    pub fn new(m: &Matrix2<f64>) -> Self {
        let (a, b, d) = (m[(0, 0)], m[(1, 0)], m[(1, 1)]);
        let mean = 0.5 * (a + d);
        let half_diff = 0.5 * (a - d);
        let radius = half_diff.hypot(b);
        let phi = 0.5 * b.atan2(half_diff);
        let (s, c) = phi.sin_cos();
        let hi = mean + radius;
        // The product of the eigenvalues is the determinant; recovering the
        // small one from it avoids cancellation in `mean - radius`.
        let lo = if hi > 0.0 && mean > 0.0 {
            (a * d - b * b) / hi
        } else {
            mean - radius
        };
        SymEigen2 {
            values: Vector2::new(hi, lo),
            vectors: Matrix2::new(c, -s, s, c),
        }
    }

    /// `V diag(f(λ)) Vᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix2<f64> {
        let d = Matrix2::from_diagonal(&self.values.map(f));
        symmetrize(&(self.vectors * d * self.vectors.transpose()))
    }
}

pub(crate) fn symmetrize(m: &Matrix2<f64>) -> Matrix2<f64> {
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    Matrix2::new(m[(0, 0)], off, off, m[(1, 1)])
}

/// A 2×2 symmetric positive definite matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix2<f64>", into = "Matrix2<f64>")]
pub struct Spd2(Matrix2<f64>);

impl Spd2 {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotPositiveDefinite("non-finite entry".into()));
        }
        let scale = m.amax().max(1.0);
        let asym = (m[(0, 1)] - m[(1, 0)]).abs();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotPositiveDefinite(format!(
                "asymmetric by {asym:e}"
            )));
        }
        let m = symmetrize(&m);
        let eig = SymEigen2::new(&m);
        if !(eig.values[1] > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalues {} and {}",
                eig.values[0], eig.values[1]
            )));
        }
        Ok(Spd2(m))
    }

    pub fn identity() -> Self {
        Spd2(Matrix2::identity())
    }

    /// Skips validation; the caller guarantees symmetry and definiteness.
    pub(crate) fn from_trusted(m: Matrix2<f64>) -> Self {
        Spd2(symmetrize(&m))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn eigen(&self) -> SymEigen2 {
        SymEigen2::new(&self.0)
    }

    pub fn sqrt(&self) -> Matrix2<f64> {
        self.eigen().map(f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> Matrix2<f64> {
        self.eigen().map(|l| 1.0 / l.sqrt())
    }

    pub fn inverse(&self) -> Matrix2<f64> {
        self.eigen().map(|l| 1.0 / l)
    }

    pub fn log(&self) -> Matrix2<f64> {
        self.eigen().map(f64::ln)
    }

    /// `Oᵀ S O` for an orthogonal `O`.
    pub fn rotate(&self, o: &Matrix2<f64>) -> Spd2 {
        Spd2::from_trusted(o.transpose() * self.0 * o)
    }

    pub fn scale(&self, c: f64) -> Result<Spd2> {
        Spd2::new(self.0 * c)
    }
}

impl TryFrom<Matrix2<f64>> for Spd2 {
    type Error = Error;
    fn try_from(m: Matrix2<f64>) -> Result<Self> {
        Spd2::new(m)
    }
}

impl From<Spd2> for Matrix2<f64> {
    fn from(s: Spd2) -> Self {
        s.0
    }
}

/// Eigenvalues of `A^{-1/2} B A^{-1/2}`, i.e. the generalized eigenvalues
/// of the pencil `(B, A)`.
fn relative_eigenvalues(a: &Spd2, b: &Spd2) -> Vector2<f64> {
    let w = a.inv_sqrt();
    SymEigen2::new(&symmetrize(&(w * b.0 * w))).values
}

/// Affine-invariant distance `‖log(A^{-1/2} B A^{-1/2})‖_F`.
pub fn spd_distance(a: &Spd2, b: &Spd2) -> f64 {
    relative_eigenvalues(a, b)
        .iter()
        .map(|l| l.ln().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Point at parameter `t` on the affine-invariant geodesic from `a` to `b`:
/// `A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
pub fn spd_geodesic(a: &Spd2, b: &Spd2, t: f64) -> Spd2 {
    let eig = a.eigen();
    let root = eig.map(f64::sqrt);
    let inv_root = eig.map(|l| 1.0 / l.sqrt());
    let inner = symmetrize(&(inv_root * b.0 * inv_root));
    let power = SymEigen2::new(&inner).map(|l| l.powf(t));
    Spd2::from_trusted(root * power * root)
}
