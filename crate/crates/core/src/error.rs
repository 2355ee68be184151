//! Error type shared across the crate.

/// Errors raised by exact arithmetic, geometry and symbol computations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched fields: {0} vs {1}")]
    MismatchedFields(String, String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the supported desk scale (2^20)")]
    FieldTooLarge(u128),
    #[error("modulus is not irreducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("Kummer hypothesis violated: {m} does not divide {q}-1")]
    KummerHypothesis { m: u64, q: u64 },
    #[error("zero input: {0}")]
    ZeroInput(&'static str),
    #[error("element is not in the subfield image")]
    NotInSubfield,
    #[error("precision exhausted (cap {0})")]
    PrecisionExhausted(usize),
    #[error("cannot distinguish from zero within precision and no regenerator")]
    CannotNormalize,
    #[error("coefficient at index {0} is beyond the known window")]
    UnknownCoefficient(i64),
    #[error("reduction undefined: {0}")]
    NonUnitReduction(&'static str),
    #[error("substitution does not converge: {0}")]
    NotConvergent(&'static str),
    #[error("determinant window failed to stabilize below cap {0}")]
    NonStabilization(usize),
    #[error("incompatible operands: {0}")]
    Incompatible(&'static str),
    #[error("unsupported geometry: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrices do not commute")]
    NonCommuting,
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("unknown engine: {0}")]
    UnknownEngine(String),
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::UnknownEngine(_)
            | Error::KummerHypothesis { .. }
            | Error::NotPrime(_)
            | Error::BadModulus(_)
            | Error::ReducibleModulus(_) => 2,
            Error::Unsupported(_) | Error::FieldTooLarge(_) => 3,
            Error::PrecisionExhausted(_)
            | Error::NonStabilization(_)
            | Error::CannotNormalize
            | Error::UnknownCoefficient(_) => 4,
            _ => 5,
        }
    }
}
