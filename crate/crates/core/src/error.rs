use thiserror::Error;

/// Every failure the library can report.
///
/// Computational failures (rounding, insufficient basis, ...) are values,
/// never panics; the CLI maps all of them to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series has no nonzero coefficient below its truncation order")]
    ZeroLeadingCoefficient,

    #[error("conductor {from} does not divide {to}")]
    ConductorMismatch { from: u32, to: u32 },

    #[error("cannot invert the zero cyclotomic number")]
    DivisionByZero,

    #[error("vector ({v1}, {v2}) lies in Z^2")]
    IntegerVector { v1: String, v2: String },

    #[error("vectors are congruent up to sign modulo Z^2")]
    CongruentVectors,

    #[error("evaluation point is a lattice point")]
    PoleAtLatticePoint,

    #[error("matrix is not in Gamma0({level})")]
    NotInGamma0 { level: i64 },

    #[error("{d} does not divide the level {level}")]
    NotADivisor { d: u64, level: u64 },

    #[error("target is not in the span of the monomial basis; residual starts at q^{residual_exponent}")]
    InsufficientBasis { residual_exponent: String },

    #[error("target known to O(q^{have}) but comparison requires O(q^{need})")]
    InsufficientTruncation { have: String, need: i64 },

    #[error("no rational relation of degree <= {degree_bound}")]
    NoRelation { degree_bound: usize },

    #[error("imaginary part of tau must be positive")]
    NonPositiveImaginaryPart,

    #[error("conductor {0} is not divisible by 4")]
    ConductorNotDivisibleBy4(u64),

    #[error("rounding residual 1e{residual_log10:.1} exceeds threshold at {digits} digits; retry with more digits")]
    RoundingFailure { residual_log10: f64, digits: u32 },

    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),

    #[error("matrix determinant is not 1 modulo {modulus}")]
    NotUnimodular { modulus: i64 },

    #[error("level {level} does not divide conductor {conductor}")]
    LevelMismatch { level: u64, conductor: u64 },

    #[error("value expected to be real has imaginary part 1e{imag_log10:.1}")]
    NotReal { imag_log10: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
