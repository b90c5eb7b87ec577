use thiserror::Error;

/// Errors raised anywhere in the ansatz pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("potential is not strictly convex: {0}")]
    ConvexityViolation(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    AccuracyFailure { estimate: f64, error_bound: f64 },

    #[error("truncation domain not found: {0}")]
    DomainFailure(String),

    #[error("numerical breakdown at n = {n}: {reason}")]
    NumericalBreakdown { n: usize, reason: String },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("domain too small for level {level}: |psi| = {boundary_amplitude:e} at boundary, try half-width >= {suggested_half_width}")]
    DomainTooSmall { level: usize, boundary_amplitude: f64, suggested_half_width: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
