//! Pseudo-geodesics and the closeness on S⁺(2,n), plus the horizontal
//! inner product of the quotient geometry.

use nalgebra::{Matrix2, MatrixXx2};

use super::grassmann::{canonical_align, geodesic_basis};
use super::point::PsdPoint;
use super::spd::{spd_distance, spd_geodesic, Spd2};
use crate::error::{Error, Result};

/// Default weight of the covariance term.
pub const DEFAULT_K: f64 = 0.01;

const HORIZONTAL_TOL: f64 = 1e-8;

pub(crate) fn check_weight(k: f64) -> Result<()> {
    if k >= 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "weight k = {k} must be finite and ≥ 0"
        )))
    }
}

/// Curve `U(t) S(t) U(t)ᵀ` joining `a` (t = 0) to `b` (t = 1): a Grassmann
/// geodesic for the span and an affine-invariant geodesic for the aligned
/// shapes.
pub fn pseudo_geodesic(a: &PsdPoint, b: &PsdPoint, t: f64) -> Result<PsdPoint> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("geodesic parameter {t}")));
    }
    let pair = canonical_align(a, b)?;
    let basis = geodesic_basis(&pair, t);
    let shape = spd_geodesic(pair.first.shape(), pair.second.shape(), t);
    Ok(PsdPoint::from_parts(basis, shape))
}

/// Squared length of the pseudo-geodesic: `‖Θ‖²_F + k d²_P₂(S₁, S₂)` on the
/// canonically aligned pair. Symmetric, but not a metric.
pub fn closeness(a: &PsdPoint, b: &PsdPoint, k: f64) -> Result<f64> {
    check_weight(k)?;
    if a == b {
        return Ok(0.0);
    }
    let pair = canonical_align(a, b)?;
    let grass = pair.angles.norm_squared();
    if k == 0.0 {
        return Ok(grass);
    }
    let spd = spd_distance(pair.first.shape(), pair.second.shape());
    Ok(grass + k * spd * spd)
}

/// `tr(M₁ᵀM₂) + k tr(N₁ S⁻¹ N₂ S⁻¹)` for horizontal tangent vectors
/// `(Mᵢ, Nᵢ)` at `(U, S)`.
pub fn horizontal_inner_product(
    m1: &MatrixXx2<f64>,
    n1: &Matrix2<f64>,
    m2: &MatrixXx2<f64>,
    n2: &Matrix2<f64>,
    at_basis: &MatrixXx2<f64>,
    at_shape: &Spd2,
    k: f64,
) -> Result<f64> {
    if !k.is_finite() {
        return Err(Error::InvalidParameter(format!("weight k = {k}")));
    }
    for m in [m1, m2] {
        if m.nrows() != at_basis.nrows() {
            return Err(Error::DimensionMismatch {
                expected: at_basis.nrows(),
                found: m.nrows(),
            });
        }
        let leak = (m.transpose() * at_basis).amax();
        if leak > HORIZONTAL_TOL * m.norm().max(1.0) {
            return Err(Error::NotHorizontal(leak));
        }
    }
    for n in [n1, n2] {
        if (n - n.transpose()).amax() > 1e-12 * n.amax().max(1.0) {
            return Err(Error::InvalidInput(
                "shape tangent must be symmetric".into(),
            ));
        }
    }
    let inv = at_shape.inverse();
    let basis_term = m1.dot(m2);
    let shape_term = (n1 * inv * n2 * inv).trace();
    Ok(basis_term + k * shape_term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grassmann::grassmann_distance;
    use crate::geometry::test_support::{random_point, unit_basis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_err(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs().max(1e-300)
    }

    #[test]
    fn zero_weight_collapses_to_grassmann() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (a, b) = (random_point(&mut rng, 9), random_point(&mut rng, 9));
            let g = grassmann_distance(&a, &b).unwrap();
            assert!((closeness(&a, &b, 0.0).unwrap() - g * g).abs() <= 1e-10);
        }
    }

    #[test]
    fn self_closeness_is_zero_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let (a, b) = (random_point(&mut rng, 9), random_point(&mut rng, 9));
            assert!(closeness(&a, &a, 0.3).unwrap() < 1e-20);
            let ab = closeness(&a, &b, 0.3).unwrap();
            let ba = closeness(&b, &a, 0.3).unwrap();
            assert!((ab - ba).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_scaling_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_point(&mut rng, 7);
        let c: f64 = 2.5;
        let b = PsdPoint::new(a.basis().clone(), a.shape().scale(c).unwrap()).unwrap();
        let k = 0.2;
        let want = 2.0 * k * c.ln().powi(2);
        assert!(rel_err(closeness(&a, &b, k).unwrap(), want) < 1e-12);
        let mid = pseudo_geodesic(&a, &b, 0.5).unwrap();
        assert!(grassmann_distance(&mid, &a).unwrap() < 1e-12);
        let want_mid = a.gram() * c.sqrt();
        assert!((mid.gram() - &want_mid).norm() < 1e-12 * want_mid.norm());
    }

    #[test]
    fn negative_weight_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = random_point(&mut rng, 5);
        assert!(matches!(
            closeness(&a, &a, -1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn pseudo_geodesic_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..50 {
            let (a, b) = (random_point(&mut rng, 8), random_point(&mut rng, 8));
            let start = pseudo_geodesic(&a, &b, 0.0).unwrap();
            let end = pseudo_geodesic(&a, &b, 1.0).unwrap();
            assert!((start.gram() - a.gram()).norm() <= 1e-8 * a.gram().norm());
            assert!((end.gram() - b.gram()).norm() <= 1e-8 * b.gram().norm());
        }
    }

    #[test]
    fn closeness_scales_quadratically_along_pseudo_geodesic() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let (a, b) = (random_point(&mut rng, 8), random_point(&mut rng, 8));
            let k = rng.random_range(0.0..1.0);
            let d = closeness(&a, &b, k).unwrap();
            for t in [0.25, 0.5, 0.75] {
                let c = pseudo_geodesic(&a, &b, t).unwrap();
                assert!(rel_err(closeness(&a, &c, k).unwrap(), t * t * d) < 1e-6);
            }
        }
    }

    #[test]
    fn horizontal_product_matches_trace_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = random_point(&mut rng, 6);
        let u = p.basis();
        let proj = |m: MatrixXx2<f64>| -> MatrixXx2<f64> {
            let utm: Matrix2<f64> = u.transpose() * &m;
            &m - u * utm
        };
        let m1 = proj(MatrixXx2::from_fn(6, |_, _| rng.random_range(-1.0..1.0)));
        let m2 = proj(MatrixXx2::from_fn(6, |_, _| rng.random_range(-1.0..1.0)));
        let n1 = Matrix2::new(0.3, -0.2, -0.2, 1.1);
        let n2 = Matrix2::new(-0.5, 0.4, 0.4, 0.2);
        let k = 0.7;
        let got = horizontal_inner_product(&m1, &n1, &m2, &n2, u, p.shape(), k).unwrap();

        // Element-wise traces against an explicit inverse.
        let s_inv = p.shape().matrix().try_inverse().unwrap();
        let mut basis_term = 0.0;
        for i in 0..6 {
            for j in 0..2 {
                basis_term += m1[(i, j)] * m2[(i, j)];
            }
        }
        let prod = n1 * s_inv * n2 * s_inv;
        let want = basis_term + k * (prod[(0, 0)] + prod[(1, 1)]);
        assert!((got - want).abs() < 1e-12);

        let swapped = horizontal_inner_product(&m2, &n2, &m1, &n1, u, p.shape(), k).unwrap();
        assert!((got - swapped).abs() < 1e-12);
        let zero = MatrixXx2::zeros(6);
        let z2 = Matrix2::zeros();
        assert_eq!(
            horizontal_inner_product(&zero, &z2, &zero, &z2, u, p.shape(), k).unwrap(),
            0.0
        );
        let basis_only = horizontal_inner_product(&m1, &n1, &m2, &n2, u, p.shape(), 0.0).unwrap();
        assert!((basis_only - basis_term).abs() < 1e-12);
        let self_product = horizontal_inner_product(&m1, &n1, &m1, &n1, u, p.shape(), k).unwrap();
        assert!(self_product > 0.0);
    }

    #[test]
    fn vertical_tangent_is_rejected() {
        let u = unit_basis(4, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let m = u.clone();
        let n = Matrix2::zeros();
        let err = horizontal_inner_product(&m, &n, &m, &n, &u, &Spd2::identity(), 1.0);
        assert!(matches!(err, Err(Error::NotHorizontal(_))));
    }
}
