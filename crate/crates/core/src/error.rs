use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {0} outside the supported range 3 <= p < 2^31")]
    PrimeOutOfRange(u64),

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("p = {p} divides the denominator of parameter {param}")]
    BadPrime { p: u64, param: String },

    #[error("parameter {num}/{den} is not in lowest terms")]
    NonReduced { num: u64, den: u64 },

    #[error("parameter {num}/{den} is outside 0 < a/b <= 1")]
    OutOfRange { num: u64, den: u64 },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("coefficient f_{{p-k}} vanishes for p = {p}, k = {k}")]
    BadK { p: u64, k: usize },

    #[error("p = {p} is in no congruence class covered for b = {b}")]
    ClassNotCovered { b: u64, p: u64 },

    #[error("lambda = {0} is excluded for this family")]
    ExcludedLambda(u64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
