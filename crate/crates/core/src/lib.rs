//! Spherical preferences `u(x) = c·(x·x) + d·x` on ℝⁿ.
//!
//! The crate covers vector geometry, the preference family and its
//! classification, randomized checkers for the ordinal axioms, an exact
//! simplex solver, finite-data rationalizability with witnesses and
//! certificates, and the quadratic + linear decomposition of cardinal
//! utilities. Every algorithm runs either over exact rationals or over
//! `f64`, selected through the [`Scalar`] type parameter.

pub mod axioms;
pub mod cardinal;
pub mod error;
pub mod geometry;
mod json;
pub mod lp;
pub mod preference;
mod rational;
pub mod rationalize;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{dot, project_out, sq_norm, Vector};
pub use preference::{Comparison, PreferenceClass, SphericalParams};
pub use rationalize::{ObservationSet, RationalizabilityVerdict, Restriction};
pub use scalar::{Rational, Scalar};
