use alloc::string::String;
use core::fmt;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid input: bad dimensions, probabilities, window lengths, empty sets.
    Domain(String),
    /// A numerical solver failed (iteration cap, singular system).
    Solver(String),
    /// A solver stopped with a duality gap above the requested tolerance.
    NotConverged { lower: f64, upper: f64, iterations: usize },
    /// Code construction failed, e.g. every candidate was expurgated.
    Construction(String),
    /// A rejection sampler exhausted its attempt budget.
    Generation { attempts: usize, reason: String },
    /// An internal consistency check failed.
    Invariant(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Solver(m) => write!(f, "solver error: {m}"),
            Error::NotConverged { lower, upper, iterations } => write!(
                f,
                "not converged after {iterations} iterations: bounds [{lower}, {upper}]"
            ),
            Error::Construction(m) => write!(f, "construction error: {m}"),
            Error::Generation { attempts, reason } => {
                write!(f, "generation failed after {attempts} attempts: {reason}")
            }
            Error::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
