use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series has no nonzero coefficient")]
    ZeroSeries,
    #[error("series has a pole at t = 0")]
    PoleAtZero,
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("transform matrix has determinant {0}, expected +1 or -1")]
    NonUnimodular(i64),
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("leading coefficient matrix is numerically singular (rcond {rcond:.3e})")]
    SingularLeadingBlock { rcond: f64 },
    #[error("point is not on the variety: residual {0:.3e}")]
    NotOnVariety(f64),
    #[error("Jacobian vanishes identically to the working order")]
    ZeroJacobian,
    #[error("Pade denominator system is rank deficient")]
    DegenerateDenominator,
    #[error("Pade approximant has a pole at the evaluation point")]
    PoleHit,
    #[error("invalid input: {0}")]
    Input(String),
}
