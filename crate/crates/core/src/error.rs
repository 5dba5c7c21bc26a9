use thiserror::Error;

/// Errors raised across topology construction, simulation and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A graph or network violates a structural requirement (connectivity,
    /// cluster layout, unsatisfiable construction parameters).
    #[error("topology error: {0}")]
    Topology(String),

    /// Matrix or vector dimensions disagree.
    #[error("shape error: {0}")]
    Shape(String),

    /// A mixing matrix fails its doubly-stochastic/support checks.
    #[error("invalid weights: {0}")]
    Weights(String),

    /// Non-finite or otherwise unusable numeric input.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A configuration field is missing or out of range.
    #[error("invalid value for `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// A closed-form quantity was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Artifacts produced under different configurations were combined.
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
