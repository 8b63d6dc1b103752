use thiserror::Error;

/// Library-wide error type. Each variant names the contract it enforces.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground-set mismatch: {0} vs {1}")]
    GroundSetMismatch(usize, usize),
    #[error("point {0} outside ground set of size {1}")]
    PointOutOfRange(usize, usize),
    #[error("duplicate source or target in partial bijection")]
    NotInjective,
    #[error("parts {0} and {1} are incompatible, no join exists")]
    IncompatiblePair(usize, usize),
    #[error("closure exceeded the element budget of {0}")]
    CapExceeded(usize),
    #[error("word {0:?} lies outside the domain code")]
    WordOutsideDomain(String),
    #[error("backend mismatch: operands live in different Stone algebras")]
    BackendMismatch,
    #[error("alphabet mismatch: arity {0} vs {1}")]
    ArityMismatch(u8, u8),
    #[error("digit {0} is not a letter of an arity-{1} alphabet")]
    BadDigit(u8, u8),
    #[error("mean depth must be at least 1")]
    DepthTooSmall,
    #[error("tarski base must be nonzero")]
    ZeroBase,
    #[error("tarski degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("expected a degree-2 tarski matrix, got degree {0}")]
    DegreeNotTwo(usize),
    #[error("pair cannot be tightened in the finite-subset backend")]
    Untightenable,
    #[error("pair is not orthogonal")]
    NotOrthogonal,
    #[error("pair is not tight: ranges do not cover the base")]
    NotTight,
    #[error("code is not complete: cylinders do not cover the space")]
    IncompleteCode,
    #[error("displacement bound {bound} exceeded at point {point}")]
    DisplacementExceeded { point: usize, bound: String },
    #[error("generator is not a bijection of the ground set")]
    NotBijective,
    #[error("representation is undefined on a required element")]
    RepUndefined,
    #[error("representation is not unitary on the unit group")]
    NotUnitary,
    #[error("measure weight must be strictly positive")]
    NonpositiveWeight,
    #[error("supports are not disjoint invariant clopens")]
    BadSupports,
    #[error("matrix dimensions do not match: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
