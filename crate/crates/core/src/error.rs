use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Floating point payloads are reported as `f64` regardless of the scalar
/// type the computation ran in.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency {omega} outside the model domain [{lo}, {hi})")]
    OutOfDomain { omega: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("matrix is not positive semidefinite: pivot {pivot:e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("{0}")]
    Unsupported(String),

    #[error("spectral table: {0}")]
    Table(String),

    #[error("aliasing tail cannot be bounded below {target:e} within {max_terms} terms")]
    TailBound { target: f64, max_terms: usize },

    #[error("peak constraint violated: |x|^2 = {energy} exceeds {peak}")]
    PeakViolation { energy: f64, peak: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
