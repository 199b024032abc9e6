use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {index} = ({re}, {im}) is not strictly inside the unit disc")]
    PointOutsideDisc { index: usize, re: f64, im: f64 },

    #[error("points {first} and {second} are within pseudohyperbolic distance {distance:e}")]
    NearCollision {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),

    #[error("sequence needs at least {needed} points, got {found}")]
    SequenceTooShort { needed: usize, found: usize },

    #[error("base {0} must lie in (0, 1)")]
    InvalidC(f64),

    #[error("{n_terms} terms leave c^(n+1) = {tail_start} above 1/2; at least {needed} terms are required")]
    InsufficientTerms {
        n_terms: usize,
        needed: usize,
        tail_start: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tolerance not reached after {max_iterations} iterations (residual {residual:e})")]
    ToleranceNotReached {
        max_iterations: usize,
        residual: f64,
    },

    #[error("not a frame: lower bound {lower:e} is below the floor {floor:e}")]
    NotAFrame { lower: f64, floor: f64 },

    #[error("Gram matrix is ill-conditioned: lower bound {lower:e} is below the floor {floor:e}")]
    IllConditioned { lower: f64, floor: f64 },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("vector system has no representation operator")]
    MissingOperator,

    #[error("vector system has {found} vectors, {needed} are required")]
    InsufficientVectors { needed: usize, found: usize },

    #[error("fixture kind requires a base iterated system")]
    MissingBase,

    #[error("tensor products at {first:?} and {second:?} coincide (distance {distance:e})")]
    ProductCollision {
        first: (usize, usize),
        second: (usize, usize),
        distance: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("tensor bounds cross-check failed: factor product {product:e} vs direct {direct:e}")]
    CrossCheckMismatch { product: f64, direct: f64 },
}
