//! Crate-wide error type.

use std::fmt;

/// Everything that can go wrong across the matrix kernels, the functional
/// calculus, the transformer layer, and the sweep harness.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Matrix construction from non-square or length-mismatched data.
    NotSquare { rows: usize, len: usize },
    /// A matrix entry or scalar parameter is NaN or infinite.
    NonFinite,
    /// Operands of incompatible dimensions.
    DimensionMismatch { left: usize, right: usize },
    /// An iterative decomposition exceeded its sweep budget.
    DecompositionFailure(&'static str),
    /// Input fails the normality test `||A*A - AA*|| <= tol * ||A||^2`.
    NotNormal,
    /// Input is not Hermitian positive semidefinite within tolerance.
    NotPsd,
    /// A parameter is outside the operation's domain (e.g. negative power).
    NotApplicable(&'static str),
    /// Spectrum is not strictly inside the open unit disk.
    SpectrumNotInDisk,
    /// Scalar argument outside the open unit disk.
    OutsideDisk,
    /// Herglotz atom data is invalid (weights or angles).
    BadAtoms(&'static str),
    /// Operator field weights do not sum to one.
    NotProbability,
    /// Ordered operator bounds are not actually ordered (upper - lower not PSD).
    BadBounds,
    /// Schatten exponents violate the required relation.
    BadExponents,
    /// An inequality instance fails a hypothesis the bound requires.
    HypothesisViolated(String),
    /// Sweep configuration rejected, with the offending field named.
    ConfigInvalid(String),
    /// An aggregate over an empty collection was requested.
    EmptyInput,
    /// Report or config I/O failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { rows, len } => {
                write!(f, "matrix data is not square: {rows} rows, {len} entries")
            }
            Error::NonFinite => write!(f, "non-finite entry or parameter"),
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::DecompositionFailure(which) => {
                write!(f, "{which} did not converge within the sweep budget")
            }
            Error::NotNormal => write!(f, "matrix is not normal within tolerance"),
            Error::NotPsd => write!(f, "matrix is not Hermitian PSD within tolerance"),
            Error::NotApplicable(what) => write!(f, "not applicable: {what}"),
            Error::SpectrumNotInDisk => {
                write!(f, "spectrum is not strictly inside the open unit disk")
            }
            Error::OutsideDisk => write!(f, "argument lies outside the open unit disk"),
            Error::BadAtoms(what) => write!(f, "invalid atoms: {what}"),
            Error::NotProbability => write!(f, "field weights do not sum to one"),
            Error::BadBounds => write!(f, "upper bound minus lower bound is not PSD"),
            Error::BadExponents => {
                write!(f, "exponents do not satisfy 1/p = 1/(2q) + 1/(2r)")
            }
            Error::HypothesisViolated(what) => write!(f, "hypothesis violated: {what}"),
            Error::ConfigInvalid(what) => write!(f, "invalid sweep config: {what}"),
            Error::EmptyInput => write!(f, "empty input"),
            Error::Io(what) => write!(f, "i/o error: {what}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
