//! Static shape representation and the Riemannian machinery on S⁺(2,n),
//! the Grassmannian G(2,n) and the SPD cone P₂.
//!
//! A centered landmark configuration `Z` (n×2, rank 2) is represented by its
//! Gram matrix `G = ZZᵀ`, which is invariant to rotations, reflections and
//! (after centering) translations. Points are stored factored as `(U, S)`
//! with `G = U S Uᵀ`, so that every distance works on n×2 and 2×2 matrices.

mod baseline;
mod closeness;
mod grassmann;
mod landmarks;
mod point;
pub(crate) mod spd;

pub use baseline::{
    default_epsilon, flat_distance, regularized_spd_distance, DEFAULT_EPSILON_SCALE,
};
pub use closeness::{closeness, horizontal_inner_product, pseudo_geodesic, DEFAULT_K};
pub use grassmann::{
    canonical_align, grassmann_distance, grassmann_geodesic, principal_angles, AlignedPair,
    PrincipalAngles, SIN_CUTOFF,
};
pub use landmarks::{
    center_landmarks, covariance, gram, matrix_from_rows, squared_distance_matrix,
    squared_distances_from_gram, LandmarkConfig, RANK_TOL,
};
pub use point::{polar_decompose, PsdPoint};
pub use spd::{spd_distance, spd_geodesic, Spd2, SymEigen2};

pub(crate) use closeness::check_weight;

/// Centers a raw configuration and returns its factored Gram point.
pub fn point_from_landmarks(raw: &nalgebra::MatrixXx2<f64>) -> crate::Result<PsdPoint> {
    polar_decompose(&center_landmarks(raw)?)
}
