//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, DeliveryError>;

/// Errors surfaced by solvers, transforms and generators.
///
/// The CLI maps these onto process exit codes: input errors exit 2,
/// infeasibility exits 1, resource limits exit 3.
#[derive(Debug, Error)]
pub enum DeliveryError {
    /// Malformed input: dangling indices, unknown nodes, invalid formats.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The request is well-formed but has no feasible answer
    /// (disconnected pairs, unreachable messages, infeasible schedules).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An operation was called outside its supported regime
    /// (e.g. coordination with non-uniform weights).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A configured resource guard was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// An internal invariant failed. Reaching this is a bug, not a user error.
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl DeliveryError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        DeliveryError::InvalidInput(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        DeliveryError::Infeasible(msg.into())
    }
}
