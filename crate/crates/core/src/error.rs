use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Integration produced a non-finite state.
    #[error("integration failed at t = {t}: {reason}")]
    Integration {
        t: f64,
        reason: String,
        /// Last finite sample `(t, coordinates)` before the failure.
        last_valid: Option<(f64, Vec<f64>)>,
    },

    /// An event search ran past its horizon without a crossing.
    #[error("no crossing found before the horizon t = {horizon}")]
    Timeout { horizon: f64 },

    /// Lines that should intersect do not, or a region is unbounded.
    #[error("degenerate geometry: {0}")]
    Geometry(String),

    /// Scenario configuration is malformed or semantically invalid.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
