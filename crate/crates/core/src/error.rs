use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, FewError>;

#[derive(Debug, Clone, PartialEq)]
pub enum FewError {
    /// Two operands disagree on shape.
    DimensionMismatch { expected: usize, found: usize },
    /// Subsystem dimension outside what the operation supports.
    UnsupportedDimension(usize),
    NotSquare { rows: usize, cols: usize },
    NotHermitian { deviation: f64 },
    NotTraceless { trace: f64 },
    TraceNotOne { trace: f64 },
    NotPositive { min_eigenvalue: f64 },
    NotUnitary { subsystem: usize, deviation: f64 },
    /// A scalar parameter fell outside its allowed interval.
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    /// Coefficient of the all-identity product element must be zero.
    NonzeroIdentityCoefficient(f64),
    ZeroOperator,
    GridTooLarge { evaluations: u128, limit: u128 },
    InvalidConfig(String),
}

impl fmt::Display for FewError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FewError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            FewError::UnsupportedDimension(d) => write!(f, "unsupported subsystem dimension {d}"),
            FewError::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            FewError::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max |M - M^dag| = {deviation:e})")
            }
            FewError::NotTraceless { trace } => write!(f, "matrix is not traceless (trace = {trace:e})"),
            FewError::TraceNotOne { trace } => write!(f, "trace is {trace}, expected 1"),
            FewError::NotPositive { min_eigenvalue } => {
                write!(f, "matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:e})")
            }
            FewError::NotUnitary { subsystem, deviation } => {
                write!(f, "factor {subsystem} is not unitary (deviation {deviation:e})")
            }
            FewError::OutOfRange { name, value, lo, hi } => {
                write!(f, "{name} = {value} outside [{lo}, {hi}]")
            }
            FewError::NonzeroIdentityCoefficient(v) => {
                write!(f, "identity coefficient must be 0, got {v}")
            }
            FewError::ZeroOperator => write!(f, "operator has zero Hilbert-Schmidt norm"),
            FewError::GridTooLarge { evaluations, limit } => {
                write!(f, "grid needs {evaluations} evaluations, limit is {limit}")
            }
            FewError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for FewError {}
