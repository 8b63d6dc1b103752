//! Scalar abstraction for the linear-algebra and LP layers.
//!
//! The combinatorial core never touches scalars; matrices and the simplex
//! solver are generic over this trait so the same code runs over exact
//! rationals (verdicts) and floats (norm estimates).

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_int(n: i64) -> Self;
}

impl Scalar for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    fn from_int(n: i64) -> Self {
        n as f32
    }
}

/// Scalars with a decidable total order, required by the exact simplex.
/// Floats are deliberately excluded: feasibility verdicts must be proofs.
pub trait OrderedScalar: Scalar + Ord + num_traits::Signed {}

impl OrderedScalar for BigRational {}

/// Ratio constructor used all over the exact lane.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}
