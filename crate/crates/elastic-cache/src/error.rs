//! Error type shared by the in-memory model (parameters, traces, lookups).

use thiserror::Error;

/// Validation and lookup failures raised while building or evaluating models.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    /// A parameter lies outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A request trace violates an ordering or consistency rule.
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    /// An object id was requested that the trace does not contain.
    #[error("unknown object id: {0}")]
    UnknownObject(String),
}
