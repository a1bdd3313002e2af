use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero input")]
    ZeroInput,
    #[error("zero modulus")]
    ZeroModulus,
    #[error("{0} is not a fundamental discriminant")]
    NonFundamental(String),
    #[error("{0} is a square in the base field")]
    SquareDelta(String),
    #[error("unsupported evaluation point: {0}")]
    UnsupportedPoint(String),
    #[error("discriminant must be positive")]
    NegativeDiscriminant,
    #[error("series diverges at Re(s) = {0}")]
    Divergent(f64),
    #[error("pole at s = {0}")]
    PoleAtS(String),
    #[error("trace {0} is not hyperbolic")]
    NonHyperbolicTrace(i64),
    #[error("wrong variable tag: expected {expected}")]
    WrongVariableTag { expected: &'static str },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("not applicable to split extensions")]
    SplitNotApplicable,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("even prime not supported by the residue oracle")]
    EvenPrimeUnsupported,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("input too large for enumeration: {0}")]
    TooLarge(String),
    #[error("outside the region of convergence: {0}")]
    ConvergenceRegion(String),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
