use nalgebra::{DMatrix, Matrix2, MatrixXx2};
use serde::{Deserialize, Serialize};

use super::landmarks::LandmarkConfig;
use super::spd::Spd2;
use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-10;

/// A point of S⁺(2,n) stored in factored form `G = U S Uᵀ`, with `U` an
/// n×2 Stiefel matrix and `S = R²` a 2×2 SPD matrix.
///
/// The factorization is defined up to `(U O, Oᵀ S O)` for `O ∈ O(2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdPoint {
    basis: MatrixXx2<f64>,
    shape: Spd2,
}

impl PsdPoint {
    pub fn new(basis: MatrixXx2<f64>, shape: Spd2) -> Result<Self> {
        let gram: Matrix2<f64> = basis.transpose() * &basis;
        let err = (gram - Matrix2::identity()).amax();
        if !(err <= ORTHONORMAL_TOL) {
            return Err(Error::InvalidInput(format!(
                "basis columns are not orthonormal (|UᵀU - I| = {err:e})"
            )));
        }
        Ok(PsdPoint { basis, shape })
    }

    pub(crate) fn from_parts(basis: MatrixXx2<f64>, shape: Spd2) -> Self {
        PsdPoint { basis, shape }
    }

    pub fn basis(&self) -> &MatrixXx2<f64> {
        &self.basis
    }

    pub fn shape(&self) -> &Spd2 {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.basis.nrows()
    }

    /// The full n×n Gram matrix `U S Uᵀ`.
    pub fn gram(&self) -> DMatrix<f64> {
        let us = &self.basis * self.shape.matrix();
        let g = us * self.basis.transpose();
        DMatrix::from_fn(self.n(), self.n(), |i, j| 0.5 * (g[(i, j)] + g[(j, i)]))
    }

    /// A landmark configuration `U S^{1/2}` with this Gram matrix.
    pub fn to_landmarks(&self) -> MatrixXx2<f64> {
        &self.basis * self.shape.sqrt()
    }
}

/// Polar decomposition `Z = U R` with `R = (ZᵀZ)^{1/2}`, returned as the
/// factored point `(U, R²)`.
///
/// Computed from the thin SVD `Z = W Σ Vᵀ`: `U = W Vᵀ`, `R² = V Σ² Vᵀ`.
pub fn polar_decompose(z: &LandmarkConfig) -> Result<PsdPoint> {
    let svd = z.points().clone().svd(true, true);
    let (w, vt) = match (svd.u, svd.v_t) {
        (Some(w), Some(vt)) => (w, vt),
        _ => return Err(Error::Numeric("SVD did not return singular vectors".into())),
    };
    let sv = svd.singular_values;
    let (hi, lo) = (sv[0].max(sv[1]), sv[0].min(sv[1]));
    if !(hi > 0.0) || lo < super::landmarks::RANK_TOL * hi {
        return Err(Error::DegenerateConfiguration(format!(
            "ZᵀZ is numerically singular (σ = {hi:e}, {lo:e})"
        )));
    }
    let basis: MatrixXx2<f64> = &w * &vt;
    let vt = Matrix2::from_fn(|i, j| vt[(i, j)]);
    let s2 = Matrix2::new(sv[0] * sv[0], 0.0, 0.0, sv[1] * sv[1]);
    let shape = Spd2::from_trusted(vt.transpose() * s2 * vt);
    Ok(PsdPoint { basis, shape })
}

/// Re-orthonormalizes the two columns in place by modified Gram-Schmidt.
/// Column order and signs are kept, so a shape matrix attached to the basis
/// stays valid.
pub(crate) fn orthonormalize(u: &mut MatrixXx2<f64>) {
    for _ in 0..2 {
        let n0 = u.column(0).norm();
        u.column_mut(0).unscale_mut(n0);
        let proj = u.column(0).dot(&u.column(1));
        let c0 = u.column(0).clone_owned();
        u.column_mut(1).axpy(-proj, &c0, 1.0);
        let n1 = u.column(1).norm();
        u.column_mut(1).unscale_mut(n1);
    }
}
