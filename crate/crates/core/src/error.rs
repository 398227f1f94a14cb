use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// `a_n = 0` was hit while building the symmetrized matrix.
    DegenerateBasis { index: usize },
    /// An iterative method hit its iteration cap.
    NoConvergence { what: &'static str, index: usize },
    /// Eigenvalue branches could not be followed unambiguously.
    BranchTracking(String),
    /// The coefficient series grows instead of decaying (energy is off the spectrum).
    Divergent(String),
    /// Adaptive quadrature failed to reach the requested tolerance.
    Quadrature(String),
    /// The integration grid violates a precondition.
    Grid(String),
    /// The operation has no meaning for the given parameters.
    NotApplicable(String),
}

impl Error {
    /// `true` for errors caused by bad input rather than numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Grid(_) | Error::NotApplicable(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DegenerateBasis { index } => write!(
                f,
                "degenerate basis: a_{index} = 0; regularize with a small mu > 0 \
                 (use the critical-strength routine for the zero-energy limit)"
            ),
            Error::NoConvergence { what, index } => {
                write!(f, "{what} did not converge (index {index})")
            }
            Error::BranchTracking(msg) => write!(f, "branch tracking failed: {msg}"),
            Error::Divergent(msg) => write!(f, "divergent expansion: {msg}"),
            Error::Quadrature(msg) => write!(f, "quadrature failed: {msg}"),
            Error::Grid(msg) => write!(f, "invalid grid: {msg}"),
            Error::NotApplicable(msg) => write!(f, "not applicable: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
