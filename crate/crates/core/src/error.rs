//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by geometry construction, matrix assembly and quadrature.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Invalid argument or order passed to a special function.
    #[error("special function domain error: {0}")]
    SpecFunDomain(String),

    /// The requested curve has no unique positive radius at some angle.
    #[error("curve is not star-shaped about the expansion origin: {0}")]
    StarShapeViolation(String),

    /// Inner and outer curve intersect or are not strictly nested.
    #[error("curves are not strictly nested (min radial gap {min_gap:.6e})")]
    NestingViolation { min_gap: f64 },

    /// A collocation matrix is numerically singular; the grid cannot resolve
    /// the requested mode content (S too large, near-touching curves, ...).
    #[error("singular collocation system at y={y:.6e} ({context})")]
    SingularCollocation { y: f64, context: String },

    /// An adaptive loop hit its budget before reaching the tolerance.
    #[error("failed to converge: {0}")]
    NonConvergence(String),

    /// ln Q came out positive beyond rounding tolerance; Q must lie in (0,1].
    #[error("ln Q(iy) = {value:.3e} > 0 at y={y:.6e}")]
    SignViolation { y: f64, value: f64 },

    /// ln Q picked up an imaginary part beyond the reality tolerance.
    #[error("Im ln Q residual {residual:.3e} exceeds tolerance at y={y:.6e}")]
    RealityViolation { y: f64, residual: f64 },

    /// Configuration value outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
