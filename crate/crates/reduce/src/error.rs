use thiserror::Error;

/// Failure of a reduction transform.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    /// A parameter set violates its constraints (e.g. `step <= 0`).
    #[error("invalid parameter: {0}")]
    Param(String),
    /// The transform does not accept the value's type.
    #[error("{transform} cannot be applied to {found} values")]
    Type {
        transform: &'static str,
        found: &'static str,
    },
    /// The result falls outside the representable range.
    #[error("result out of range: {0}")]
    Range(String),
}

impl ReduceError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        ReduceError::Param(msg.into())
    }
}
