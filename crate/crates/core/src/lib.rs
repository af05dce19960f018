//! Shape trajectories on the manifold S⁺(2,n) of rank-2 positive
//! semidefinite matrices.
//!
//! Planar landmark sequences are mapped frame by frame to Gram matrices,
//! compared with a rate-invariant dynamic time warping under the closeness
//! of S⁺(2,n), and classified with a pairwise-proximity-function SVM.

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod data;
mod error;
pub mod geometry;
pub mod trajectory;

pub use error::{Error, Result};
