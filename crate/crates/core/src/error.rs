use thiserror::Error;

/// Errors raised by the exact-arithmetic and Jordan-type machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported field parameters: {0}")]
    UnsupportedField(String),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("incompatible field: {0}")]
    IncompatibleField(String),
    #[error("characteristic mismatch: {0} vs {1}")]
    CharacteristicMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not p-nilpotent (p = {0})")]
    NotNilpotent(u32),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid rank profile: {0}")]
    InvalidRankProfile(String),
    #[error("subspace is not invariant under the operator")]
    NotInvariant,
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid commuting tuple: {0}")]
    InvalidTuple(String),
    #[error("unipotent pair check failed: g * g_inv is not the identity")]
    NotInversePair,
    #[error("malformed module expression: {0}")]
    MalformedModule(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown chart: {0}")]
    UnknownChart(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("curve violates chart constraints: {0}")]
    CurveConstraint(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
