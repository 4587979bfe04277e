use alloc::string::String;
use core::fmt;

/// Errors raised by the exact pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    NotSquare { rows: usize, cols: usize },
    ZeroPolynomial,
    ZeroVector,
    NotPositiveDefinite,
    /// `u` outside `(0, 1]`.
    TemperamentOutOfRange(String),
    /// A linear system had no solution.
    Infeasible,
    /// A linear system had more than the expected degrees of freedom.
    Underdetermined { free: usize },
    DegenerateHull,
    /// The truncated hull did not produce a closed complex; retry with a larger vertex count.
    ClosureFailure { vertex_count: usize, detail: String },
    /// Bisection or retry loop exceeded its cap.
    IterationCap(String),
    /// `l | N` for a requested Hecke operator.
    LevelDividesPrime { level: u64, prime: u64 },
    NonCyclicUnits(u64),
    NonCommuting,
    /// An exact identity that must hold (`d^2 = 0`, invertibility, integrality) failed.
    Invariant(String),
    Parse(String),
    Overflow,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::ZeroPolynomial => write!(f, "zero polynomial"),
            Error::ZeroVector => write!(f, "zero lattice vector"),
            Error::NotPositiveDefinite => write!(f, "form is not positive definite"),
            Error::TemperamentOutOfRange(u) => write!(f, "temperament u = {u} outside (0, 1]"),
            Error::Infeasible => write!(f, "linear system is infeasible"),
            Error::Underdetermined { free } => {
                write!(f, "linear system is underdetermined ({free} free parameters)")
            }
            Error::DegenerateHull => write!(f, "points are affinely dependent; hull is degenerate"),
            Error::ClosureFailure { vertex_count, detail } => {
                write!(f, "fiber is not a closed complex at vertex count {vertex_count}: {detail}")
            }
            Error::IterationCap(what) => write!(f, "iteration cap exceeded: {what}"),
            Error::LevelDividesPrime { level, prime } => {
                write!(f, "prime {prime} divides level {level}")
            }
            Error::NonCyclicUnits(n) => write!(f, "(Z/{n})^x is not cyclic"),
            Error::NonCommuting => write!(f, "matrices do not commute"),
            Error::Invariant(what) => write!(f, "invariant violated: {what}"),
            Error::Parse(what) => write!(f, "parse error: {what}"),
            Error::Overflow => write!(f, "integer overflow in exact hull arithmetic"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::error::Error for Error {}
