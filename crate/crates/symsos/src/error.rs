use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("non-integer exponent at position {pos}")]
    NonIntegerExponent { pos: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator {index} is not orthogonal")]
    NonOrthogonalGenerator { index: usize },
    #[error("group closure exceeded {max_order} elements")]
    OrderExceeded { max_order: usize },
    #[error("unsupported catalog entry: {0}")]
    UnsupportedCatalog(String),
    #[error("not a conjugate pair: {0}")]
    NotConjugatePair(String),
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
    #[error("polynomial is not invariant under generator {generator}")]
    NotInvariant { generator: usize },
    #[error("rewriting failed: {0}")]
    Rewrite(String),
    #[error("equivariance check failed: {0}")]
    Equivariance(String),
    #[error("off-block residual {residual:e} exceeds tolerance")]
    OffBlockResidual { residual: f64 },
    #[error("polynomial degree {0} is odd")]
    OddDegree(usize),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("no SOS representation found at this degree: {0}")]
    NoCertificate(String),
    #[error("rounding failed: {0}")]
    Rounding(String),
    #[error("format error on line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
