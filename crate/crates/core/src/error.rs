use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the calculus, the quadratic functionals and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zI - A is numerically singular at z = {z} (reciprocal condition {rcond:.3e})")]
    SingularResolvent { z: Complex64, rcond: f64 },

    #[error("matrix is not diagonalizable to working precision (eigenvector condition {condition:.3e})")]
    NotDiagonalizable { condition: f64 },

    #[error("eigenvalue {eigenvalue} lies outside the domain sector of half-angle {half_angle}")]
    EigenvalueOutsideDomain { eigenvalue: Complex64, half_angle: f64 },

    #[error("eigenvalue {eigenvalue} lies on the negative real axis; no sector of angle < pi contains the spectrum")]
    NotSectorial { eigenvalue: Complex64 },

    #[error("eigenvalue {eigenvalue} is on or outside the rays |arg z| = {theta}")]
    EigenvalueOnBoundary { eigenvalue: Complex64, theta: f64 },

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    #[error("invalid domain half-angle {half_angle} for {symbol}")]
    InvalidDomain { symbol: String, half_angle: f64 },

    #[error("lambda = {lambda} lies in the closed sector of half-angle {half_angle}")]
    LambdaInSector { lambda: Complex64, half_angle: f64 },

    #[error("symbols {left} and {right} have incompatible domains")]
    IncompatibleDomains { left: String, right: String },

    #[error("angle {angle} outside admissible range ({lower}, {upper})")]
    AngleOutOfRange { angle: f64, lower: f64, upper: f64 },

    #[error("aperture alpha = {alpha} outside admissible range (0, {upper})")]
    AlphaOutOfRange { alpha: f64, upper: f64 },

    #[error("quadrature did not converge: estimate {estimate:.3e} above tolerance {tolerance:.3e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("I + A is numerically singular")]
    SingularShift,

    #[error("operator is numerically singular; the regularized calculus needs A one-one")]
    SingularOperator,

    #[error("kernel and range intersect nontrivially; no N(A) + R(A) splitting")]
    NotSectorialSplit,

    #[error("decay certificate (s = {s}, c = {c}) refuted at z = {z} for {symbol}")]
    CertificateRefuted { symbol: String, s: f64, c: f64, z: Complex64 },

    #[error("{symbol} is not in the required symbol class ({expected})")]
    WrongSymbolClass { symbol: String, expected: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("unknown symbol name {0:?}")]
    UnknownSymbol(String),

    #[error("unknown operator descriptor {0:?}")]
    UnknownOperator(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
