use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Root refinement did not converge within the iteration cap.
    #[error("root {j} did not converge in bracket ({lo}, {hi}) after {iterations} iterations")]
    Convergence {
        j: usize,
        lo: f64,
        hi: f64,
        iterations: usize,
    },

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    /// The IN-region tensor has no pointwise value on the potential's support.
    #[error("point x = {x} lies on the support of the potential")]
    OnPotentialSupport { x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
