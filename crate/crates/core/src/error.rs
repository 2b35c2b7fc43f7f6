use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in `{field}`: expected {expected}, found {found}")]
    DimensionMismatch {
        field: String,
        expected: usize,
        found: usize,
    },

    #[error("`{field}`: significance level {value} is outside the open interval (0, 1)")]
    AlphaOutOfRange { field: String, value: f64 },

    #[error("`{field}`: negative density value {value} at atom {index}")]
    NegativeDensity {
        field: String,
        index: usize,
        value: f64,
    },

    #[error("`{field}`: density integrates to {mass} under the reference measure, expected 1")]
    UnnormalizedDensity { field: String, mass: f64 },

    #[error("`{field}`: hypothesis family is empty")]
    EmptyFamily { field: String },

    #[error("`{field}`: value at index {index} is not finite")]
    NonFinite { field: String, index: usize },

    #[error("`R`: weight {value} at atom {index} is not strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("`R`: weights sum to {total}, expected 1")]
    UnnormalizedWeights { total: f64 },

    #[error("`atoms`: duplicate atom label `{label}`")]
    DuplicateAtom { label: String },

    #[error("`{field}`: members {first} and {second} coincide")]
    DuplicateMember {
        field: String,
        first: usize,
        second: usize,
    },

    #[error("`{field}`: test value {value} at atom {index} is outside [0, 1]")]
    TestOutOfRange {
        field: String,
        index: usize,
        value: f64,
    },

    #[error("`{field}`: prior weight {value} at member {index} is negative")]
    NegativePriorWeight {
        field: String,
        index: usize,
        value: f64,
    },

    #[error("`{field}`: mixture weights must be nonnegative and sum to 1 (sum = {sum})")]
    InvalidMixtureWeights { field: String, sum: f64 },

    #[error("invalid linear program: {0}")]
    InvalidLp(String),

    #[error("numerical breakdown in simplex: {0}")]
    NumericalBreakdown(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("weak duality violated: margin {margin} for a size-feasible test")]
    CertificateInconsistency { margin: f64 },

    #[error("a seed is required when sampling {trials} saddle-point trials")]
    SeedRequired { trials: usize },

    #[error("triple is not certified optimal: {0}")]
    NotCertified(String),

    #[error("this certificate needs a single scalar significance level")]
    ScalarAlphaRequired,

    #[error("grid enumeration of {points} points exceeds the limit of {limit}")]
    TooLarge { points: f64, limit: f64 },

    #[error("grid too coarse: member {member} puts probability {probability} in bin {bin}")]
    GridTooCoarse {
        member: String,
        bin: usize,
        probability: f64,
    },

    #[error("invalid Gaussian spec: {0}")]
    InvalidSpec(String),

    #[error("solve report does not match the problem: {0}")]
    NotSolved(String),
}
