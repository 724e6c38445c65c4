//! Error types shared across the crate.

/// Errors produced by construction and verification routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Requested working precision below the supported minimum.
    #[error("precision must be at least {min} bits, got {got}")]
    PrecisionTooLow { min: u32, got: u32 },

    /// Gamma function evaluated at a non-positive integer.
    #[error("gamma function pole at {0}")]
    GammaPole(String),

    /// Infinite q-product requested with |q| >= 1.
    #[error("divergent q-product: {0}")]
    DivergentProduct(String),

    /// Parameter set violates a family or deletion-set constraint.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Interpolated polynomial failed its held-out residual check.
    #[error("interpolation residual check failed: {0}")]
    InterpolationFailed(String),

    /// Linear solve or determinant too ill-conditioned at the working precision.
    #[error("ill-conditioned computation: {0}")]
    IllConditioned(String),

    /// A zero of the scanned function lies on or too near the contour.
    #[error("zero on or near contour boundary: {0}")]
    BoundaryZero(String),

    /// Accumulated winding number did not settle near an integer.
    #[error("winding number not near an integer: {0}")]
    NonIntegerWinding(String),

    /// Quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureFailed(String),

    /// A leading coefficient vanished at working precision.
    #[error("degenerate polynomial: {0}")]
    Degenerate(String),

    /// Evaluation outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
