use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected} samples, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch between operands ({left} vs {right})")]
    GridMismatch { left: String, right: String },

    #[error("coefficients are not Hermitian-symmetric (relative residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },

    #[error("quadrature did not converge: panel doubling changed the result by {change:.3e} (limit {limit:.1e}); increase panel counts")]
    QuadratureNotConverged { change: f64, limit: f64 },

    #[error("oscillatory integral failed: {0}")]
    Oscillatory(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("weight construction failed at level k = {k}: {reason}")]
    WeightConstruction { k: usize, reason: String },

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
