//! Exact desk-scale computations with inverse semigroups, Boolean inverse
//! monoids, type semigroups, paradoxical decompositions, Thompson's group V,
//! wobbling groups, and finite-dimensional representations.
//!
//! Everything that produces a verdict runs in exact rational arithmetic;
//! floating point appears only where operator norms are requested.

pub mod bim;
pub mod clopen;
pub mod error;
pub mod grpd;
pub mod json;
pub mod linalg;
pub mod matching;
pub mod mean;
pub mod metric;
pub mod monoid;
pub mod paradox;
pub mod pbij;
pub mod prefix;
pub mod rep;
pub mod scalar;
pub mod simplex;
pub mod thompson;
pub mod typesg;
pub mod wobble;

/// Exact scalar used for every verdict-bearing computation.
pub type Rational = num_rational::BigRational;

/// Dense exact-rational matrix.
pub type RatMatrix = linalg::Matrix<Rational>;

/// Dense floating matrix, used only for norm estimates.
pub type FloatMatrix = linalg::Matrix<f64>;

pub use error::Error;
pub use pbij::{GroundSet, PartialBijection};
