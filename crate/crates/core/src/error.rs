use thiserror::Error;

/// Errors produced by the analytic engine, the simulator and config loading.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// A configuration value violates a model invariant.
    #[error("invalid configuration: {0}")]
    Validation(String),

    /// The operation requires a specific cluster model.
    #[error("operation requires a {expected} cluster model")]
    ModelMismatch { expected: &'static str },

    /// Conditioning on an event of probability zero.
    #[error("degenerate conditioning: {0}")]
    DegenerateConditioning(String),

    /// Mixed-user weights sum to zero.
    #[error("degenerate mixture weights: {0}")]
    DegenerateWeights(String),

    /// The config file could not be read or parsed.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
