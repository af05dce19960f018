//! Baseline frame distances that work on the full n×n Gram matrices.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};

use super::point::PsdPoint;
use crate::error::{ensure_same_n, Error, Result};

/// Relative scale of the default regularization: `ε = 1e-6 · tr(G)/n`.
pub const DEFAULT_EPSILON_SCALE: f64 = 1e-6;

/// `‖G₁ - G₂‖_F`.
///
/// Uses `‖G₁‖² + ‖G₂‖² - 2 tr(G₁G₂)` on the factors, falling back to the
/// element-wise sum when that identity loses precision (nearby Grams).
pub fn flat_distance(a: &PsdPoint, b: &PsdPoint) -> Result<f64> {
    ensure_same_n(a.n(), b.n())?;
    let (s1, s2) = (a.shape().matrix(), b.shape().matrix());
    let c: Matrix2<f64> = a.basis().transpose() * b.basis();
    let n1 = s1.norm_squared();
    let n2 = s2.norm_squared();
    let cross = (s1 * c * s2 * c.transpose()).trace();
    let sq = n1 + n2 - 2.0 * cross;
    if sq > 1e-4 * (n1 + n2) {
        return Ok(sq.sqrt());
    }
    Ok(flat_distance_elementwise(a, b))
}

fn flat_distance_elementwise(a: &PsdPoint, b: &PsdPoint) -> f64 {
    let (u1, u2) = (a.basis(), b.basis());
    let w1 = u1 * a.shape().matrix();
    let w2 = u2 * b.shape().matrix();
    let mut sum = 0.0;
    for i in 0..a.n() {
        for j in 0..a.n() {
            let g1 = w1[(i, 0)] * u1[(j, 0)] + w1[(i, 1)] * u1[(j, 1)];
            let g2 = w2[(i, 0)] * u2[(j, 0)] + w2[(i, 1)] * u2[(j, 1)];
            sum += (g1 - g2).powi(2);
        }
    }
    sum.sqrt()
}

/// Default regularization for a pair: `1e-6` times the mean of `tr(Gᵢ)/n`.
pub fn default_epsilon(a: &PsdPoint, b: &PsdPoint) -> f64 {
    let n = a.n() as f64;
    DEFAULT_EPSILON_SCALE * 0.5 * (a.shape().matrix().trace() + b.shape().matrix().trace()) / n
}

/// Log-eigenvalues ≥ 0 of `A^{-1/2} B A^{-1/2}`.
fn upper_log_spectrum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(a.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NotPositiveDefinite("regularized Gram".into()));
    }
    let scaled = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        eig.eigenvectors[(i, j)] / eig.eigenvalues[j].sqrt()
    });
    let inv_sqrt = &scaled * eig.eigenvectors.transpose();
    let mut m = &inv_sqrt * b * &inv_sqrt;
    m = (&m + m.transpose()) * 0.5;
    let values = SymmetricEigen::new(m).eigenvalues;
    Ok(values
        .iter()
        .filter(|&&l| l >= 1.0)
        .map(|l| l.ln())
        .collect())
}

/// Affine-invariant distance between `G₁ + εI` and `G₂ + εI` on the full
/// cone of n×n SPD matrices.
///
/// The spectrum of `A^{-1/2} B A^{-1/2}` spans many orders of magnitude, so
/// eigenvalues ≥ 1 are taken from the `(A, B)` ordering and the rest from
/// `(B, A)`, where each is computed with full relative accuracy.
pub fn regularized_spd_distance(a: &PsdPoint, b: &PsdPoint, epsilon: f64) -> Result<f64> {
    ensure_same_n(a.n(), b.n())?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must be > 0"
        )));
    }
    let n = a.n();
    let reg = DMatrix::<f64>::identity(n, n) * epsilon;
    let ga = a.gram() + &reg;
    let gb = b.gram() + &reg;
    let up = upper_log_spectrum(&ga, &gb)?;
    let down = upper_log_spectrum(&gb, &ga)?;
    let sum: f64 = up.iter().chain(down.iter()).map(|l| l * l).sum();
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::test_support::random_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_is_zero_on_identical_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_point(&mut rng, 10);
        assert_eq!(flat_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn flat_matches_elementwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let (a, b) = (random_point(&mut rng, 10), random_point(&mut rng, 10));
            let (ga, gb) = (a.gram(), b.gram());
            let mut sum = 0.0;
            for i in 0..10 {
                for j in 0..10 {
                    sum += (ga[(i, j)] - gb[(i, j)]).powi(2);
                }
            }
            let d = flat_distance(&a, &b).unwrap();
            assert!((d - sum.sqrt()).abs() < 1e-10 * sum.sqrt());
            assert!((d - flat_distance(&b, &a).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn flat_of_known_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = random_point(&mut rng, 6);
        // Perturb the shape only: E = U ΔS Uᵀ has ‖E‖_F = ‖ΔS‖_F.
        let delta = Matrix2::new(1e-7, 2e-8, 2e-8, -3e-8);
        let shape = crate::geometry::Spd2::new(a.shape().matrix() + delta).unwrap();
        let b = PsdPoint::new(a.basis().clone(), shape).unwrap();
        let d = flat_distance(&a, &b).unwrap();
        assert!((d - delta.norm()).abs() < 1e-12);
    }

    #[test]
    fn regularized_zero_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..10 {
            let (a, b) = (random_point(&mut rng, 12), random_point(&mut rng, 12));
            let eps = default_epsilon(&a, &b);
            assert!(regularized_spd_distance(&a, &a, eps).unwrap() < 1e-6);
            let ab = regularized_spd_distance(&a, &b, eps).unwrap();
            let ba = regularized_spd_distance(&b, &a, eps).unwrap();
            assert!((ab - ba).abs() < 1e-10, "{ab} {ba}");
        }
    }

    #[test]
    fn regularized_scaled_gram_matches_eigenvalue_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let a = random_point(&mut rng, 8);
        let c = 3.0;
        let b = PsdPoint::new(a.basis().clone(), a.shape().scale(c).unwrap()).unwrap();
        let eps = 0.01;
        // Shared eigenbasis: the eigenvalues of G are those of S, then zeros.
        let s_eig = crate::geometry::spd::SymEigen2::new(a.shape().matrix()).values;
        let mut sum = 0.0;
        for &l in s_eig.iter() {
            sum += ((c * l + eps) / (l + eps)).ln().powi(2);
        }
        let want = sum.sqrt();
        let got = regularized_spd_distance(&a, &b, eps).unwrap();
        assert!((got - want).abs() < 1e-9 * want, "{got} {want}");
    }

    #[test]
    fn regularized_diagonal_pair() {
        let basis = crate::geometry::test_support::unit_basis(4, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let s1 = crate::geometry::Spd2::new(Matrix2::new(2.0, 0.0, 0.0, 5.0)).unwrap();
        let s2 = crate::geometry::Spd2::new(Matrix2::new(7.0, 0.0, 0.0, 0.5)).unwrap();
        let a = PsdPoint::new(basis.clone(), s1).unwrap();
        let b = PsdPoint::new(basis, s2).unwrap();
        let eps = 0.1;
        let want = (((7.1f64) / 2.1).ln().powi(2) + (0.6f64 / 5.1).ln().powi(2)).sqrt();
        let got = regularized_spd_distance(&a, &b, eps).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn regularized_rejects_bad_epsilon() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let a = random_point(&mut rng, 5);
        assert!(matches!(
            regularized_spd_distance(&a, &a, 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }
}
