use thiserror::Error;

/// Errors raised by the geometry, convexity, arithmetic and estimation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Coordinates or scalar inputs outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numeric parameter violates an operation's precondition.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// The requested measure is not defined on this model.
    #[error("unsupported measure: {0}")]
    UnsupportedMeasure(String),
    /// The requested computation method is not available for this body.
    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),
    /// A ray was requested from a point towards itself.
    #[error("degenerate ray: direction point coincides with base point")]
    DegenerateRay,
    /// A net does not cover the region it is asked to discretize.
    #[error("coverage error: {0}")]
    Coverage(String),
    /// Malformed input text (profiles, configs).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
