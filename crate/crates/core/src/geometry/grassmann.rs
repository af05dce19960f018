//! Principal angles, distance and geodesics on the Grassmannian G(2,n),
//! together with the canonical alignment of two factored PSD points.

use nalgebra::{Matrix2, MatrixXx2, Vector2};

use super::point::{orthonormalize, PsdPoint};
use super::spd::SymEigen2;
use crate::error::{ensure_same_n, Error, Result};

/// `sin θ` below which the geodesic direction is treated as zero.
pub const SIN_CUTOFF: f64 = 1e-12;

/// Principal angles `0 ≤ θ₁ ≤ θ₂ ≤ π/2` between two planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalAngles {
    theta: [f64; 2],
}

impl PrincipalAngles {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let ok = |t: f64| (0.0..=half_pi).contains(&t);
        if !(ok(theta1) && ok(theta2) && theta1 <= theta2) {
            return Err(Error::InvalidParameter(format!(
                "principal angles ({theta1}, {theta2}) must satisfy 0 ≤ θ₁ ≤ θ₂ ≤ π/2"
            )));
        }
        Ok(PrincipalAngles {
            theta: [theta1, theta2],
        })
    }

    pub fn theta(&self) -> [f64; 2] {
        self.theta
    }

    /// `‖Θ‖²_F`, the squared Grassmann distance.
    pub fn norm_squared(&self) -> f64 {
        self.theta[0] * self.theta[0] + self.theta[1] * self.theta[1]
    }
}

/// Two points whose bases were rotated within their fibers so that
/// `U₁ᵀU₂ = diag(cos θ₁, cos θ₂)`.
#[derive(Debug, Clone)]
pub struct AlignedPair {
    pub first: PsdPoint,
    pub second: PsdPoint,
    pub angles: PrincipalAngles,
    /// Columns `(I - U₁U₁ᵀ) U₂` of the aligned bases; column norms are `sin θᵢ`.
    residual: MatrixXx2<f64>,
    sines: Vector2<f64>,
}

impl AlignedPair {
    /// Geodesic direction `M = (I - U₁U₁ᵀ) U₂ F`, `F` the pseudoinverse of
    /// `diag(sin θ)`.
    pub fn direction(&self) -> MatrixXx2<f64> {
        let mut m = self.residual.clone();
        for i in 0..2 {
            let s = self.sines[i];
            let f = if s > SIN_CUTOFF { 1.0 / s } else { 0.0 };
            m.column_mut(i).scale_mut(f);
        }
        m
    }
}

/// Left rotation `O₁` with `O₁ᵀ C O₂` diagonal and nonnegative. Columns of
/// `C O₂` are orthogonal; the longer one fixes the frame and the other is
/// its perpendicular, so `O₁` stays exactly orthogonal when a column of
/// `C O₂` vanishes.
fn left_rotation(c: &Matrix2<f64>, o2: &Matrix2<f64>) -> Matrix2<f64> {
    let w = c * o2;
    let (n0, n1) = (w.column(0).norm(), w.column(1).norm());
    let (big, small) = if n0 >= n1 { (0, 1) } else { (1, 0) };
    let nb = n0.max(n1);
    if !(nb > 0.0) {
        return Matrix2::identity();
    }
    let e = w.column(big) / nb;
    let mut perp = Vector2::new(-e[1], e[0]);
    if perp.dot(&w.column(small)) < 0.0 {
        perp = -perp;
    }
    let mut o1 = Matrix2::zeros();
    o1.set_column(big, &e);
    o1.set_column(small, &perp);
    o1
}

/// Rotates both factorizations to the canonical fiber representative
/// realizing the principal angles between their spans.
///
/// The principal vectors come from whichever of `U₁ᵀU₂` (cosines) and the
/// residual `(I - U₁U₁ᵀ) U₂` (sines) resolves them better, and angles are
/// `atan2(sin θ, cos θ)`. This keeps both small angles and angles
/// near π/2 accurate.
pub fn canonical_align(a: &PsdPoint, b: &PsdPoint) -> Result<AlignedPair> {
    ensure_same_n(a.n(), b.n())?;
    let c: Matrix2<f64> = a.basis().transpose() * b.basis();
    let r = b.basis() - a.basis() * c;
    // CᵀC + RᵀR = I, so both Gram matrices share eigenvectors. The one with
    // the smaller top eigenvalue resolves them more accurately.
    let ctc = SymEigen2::new(&(c.transpose() * c));
    let rtr = SymEigen2::new(&(r.transpose() * &r));
    let mut o2 = if ctc.values[0] <= rtr.values[0] {
        ctc.vectors
    } else {
        rtr.vectors
    };
    let mut o1 = left_rotation(&c, &o2);
    let mut residual = &r * o2;
    let mut sines = Vector2::new(residual.column(0).norm(), residual.column(1).norm());
    let aligned_c = o1.transpose() * c * o2;
    let cos = Vector2::new(aligned_c[(0, 0)], aligned_c[(1, 1)]).map(|v| v.clamp(0.0, 1.0));
    let mut theta = [sines[0].atan2(cos[0]), sines[1].atan2(cos[1])];
    if theta[0] > theta[1] {
        theta.swap(0, 1);
        o1.swap_columns(0, 1);
        o2.swap_columns(0, 1);
        residual.swap_columns(0, 1);
        sines.swap_rows(0, 1);
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let angles = PrincipalAngles {
        theta: theta.map(|t| t.min(half_pi)),
    };
    let u1 = a.basis() * o1;
    let u2 = b.basis() * o2;
    Ok(AlignedPair {
        first: PsdPoint::from_parts(u1, a.shape().rotate(&o1)),
        second: PsdPoint::from_parts(u2, b.shape().rotate(&o2)),
        angles,
        residual,
        sines,
    })
}

/// Principal angles between `span(U₁)` and `span(U₂)`.
pub fn principal_angles(a: &PsdPoint, b: &PsdPoint) -> Result<PrincipalAngles> {
    Ok(canonical_align(a, b)?.angles)
}

/// Grassmann distance `‖Θ‖_F`.
pub fn grassmann_distance(a: &PsdPoint, b: &PsdPoint) -> Result<f64> {
    Ok(principal_angles(a, b)?.norm_squared().sqrt())
}

pub(crate) fn geodesic_basis(pair: &AlignedPair, t: f64) -> MatrixXx2<f64> {
    let theta = pair.angles.theta();
    let m = pair.direction();
    let u1 = pair.first.basis();
    let mut u = MatrixXx2::zeros(u1.nrows());
    for (i, th) in theta.iter().enumerate() {
        let (s, c) = (th * t).sin_cos();
        let col = u1.column(i) * c + m.column(i) * s;
        u.set_column(i, &col);
    }
    orthonormalize(&mut u);
    u
}

/// Basis of the Grassmann geodesic `U₁ cos(Θt) + M sin(Θt)` from
/// `span(a)` to `span(b)`.
pub fn grassmann_geodesic(a: &PsdPoint, b: &PsdPoint, t: f64) -> Result<MatrixXx2<f64>> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("geodesic parameter {t}")));
    }
    let pair = canonical_align(a, b)?;
    Ok(geodesic_basis(&pair, t))
}
