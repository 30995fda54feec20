use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// A documented precondition of the operation does not hold.
    Precondition(String),
    /// Power iteration did not meet its stopping rule; carries the last iterate.
    NoConvergence {
        iterations: usize,
        lambda: f64,
        residual: f64,
        vector: Vec<f64>,
    },
    /// Grid doubling did not settle the eigenvalue within the refinement budget.
    Refinement {
        node_count: usize,
        delta: f64,
    },
    /// Root bracketing failed: no sign change between the evaluated endpoints.
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    /// A configured size cap would be exceeded.
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::NoConvergence {
                iterations,
                lambda,
                residual,
                ..
            } => write!(
                f,
                "power iteration did not converge after {iterations} iterations \
                 (last lambda = {lambda:e}, residual = {residual:e})"
            ),
            Error::Refinement { node_count, delta } => write!(
                f,
                "grid refinement stalled at {node_count} nodes (last change {delta:e})"
            ),
            Error::Bracket { lo, hi, f_lo, f_hi } => write!(
                f,
                "no sign change on [{lo}, {hi}]: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}"
            ),
            Error::Resource {
                what,
                requested,
                cap,
            } => write!(f, "{what}: {requested} exceeds the configured cap of {cap}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
