use alloc::string::String;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Malformed input: wrong lengths, values out of range, broken invariants.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A quantity left the interior of its domain (log of zero ahead).
    #[error("boundary: {0}")]
    Boundary(String),
    /// A test oracle was asked to handle an instance beyond its size limits.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Second-moment matrix too close to singular for the IPW estimator.
    #[error("second-moment matrix ill-conditioned (lambda_min = {lambda_min:e}); raise forced exploration")]
    Conditioning {
        /// Smallest eigenvalue found.
        lambda_min: f64,
    },
    /// Bayes update with an observation the belief deems impossible.
    #[error("observation {obs} has zero predictive probability at decision {pi}")]
    ZeroLikelihood {
        /// Decision index.
        pi: usize,
        /// Observed value.
        obs: f64,
    },
}

/// Crate result alias.
pub type Result<T> = core::result::Result<T, Error>;

macro_rules! arg_err {
    ($($t:tt)*) => {
        $crate::Error::Argument(alloc::format!($($t)*))
    };
}
pub(crate) use arg_err;
