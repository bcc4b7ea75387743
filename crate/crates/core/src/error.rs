use thiserror::Error;

use crate::series::LatticePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible variable sets: rank {left} vs rank {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("incompatible truncation bounds: {left} vs {right}")]
    BoundMismatch { left: u32, right: u32 },

    #[error("constant term {constant} does not allow exponent {exponent}")]
    NonUnitConstant { constant: String, exponent: String },

    #[error("divergent substitution: argument {index} has nonzero constant term")]
    DivergentSubstitution { index: usize },

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("expected a univariate series, got rank {0}")]
    NotUnivariate(usize),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quiver has an oriented cycle")]
    Cyclic,

    #[error("local quiver has negative arrow count {count} from summand {from} to summand {to}")]
    NegativeArrowCount { from: usize, to: usize, count: i64 },

    #[error("exhaustive enumeration limit exceeded: |d| = {requested} > {limit}; use hilb_series instead")]
    OracleLimit { requested: u32, limit: u32 },

    #[error("{point:?} does not lie on the slope stratum {mu}")]
    WrongSlope { point: LatticePoint, mu: String },

    #[error("inconsistent observations at {point:?}: {reason}")]
    InconsistentObservation { point: LatticePoint, reason: String },

    #[error("factorization sanity failure: {0}")]
    Factorization(String),

    #[error("non-integral value {value} at {location}")]
    NonIntegral { location: String, value: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}
