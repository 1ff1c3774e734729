use thiserror::Error;

/// Errors raised by kernel evaluation, potential handling, integration and
/// sup searches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function (e.g. `t <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Points or potentials of different dimensions were combined.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The kernel is evaluated exactly at its singular point. Integrators
    /// treat this point through a polar substitution instead.
    #[error("kernel evaluated at its singular point")]
    SingularPoint,

    /// The requested quantity is infinite (e.g. the Newtonian kernel for d <= 2).
    #[error("divergent quantity: {0}")]
    Divergent(String),

    /// A potential whose sup norm is not structurally bounded was passed
    /// where boundedness is required.
    #[error("unbounded potential: {0}")]
    Unbounded(String),

    /// The caller must supply information that cannot be derived (e.g. a
    /// search box for a potential with unbounded support).
    #[error("usage error: {0}")]
    Usage(String),

    /// Potential DSL parse failure.
    #[error("parse error at position {position}: expected {expected}")]
    Parse { position: usize, expected: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
