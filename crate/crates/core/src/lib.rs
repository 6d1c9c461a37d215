//! Numerical geometry of constant mean curvature surfaces in the first
//! Heisenberg group H¹ with its left-invariant Riemannian metric.
//!
//! Vectors are carried as coefficients in the orthonormal frame {X, Y, T};
//! Cartesian components appear only when points are moved or exported.

pub mod curvature;
pub mod error;
pub mod geodesics;
pub mod hcurves;
pub mod hgroup;
pub mod measures;
pub mod quad;
pub mod surfaces;
pub mod tol;

pub use error::{Error, Result};
pub use hgroup::{FrameVector, Point, TangentVector};
