//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The direction vector `y` has zero norm; invariants and sprays are
    /// undefined there.
    #[error("direction vector has zero norm")]
    ZeroDirection,

    /// An evaluation point (or a finite-difference stencil around it) left
    /// the declared domain.
    #[error("left the declared domain: {0}")]
    DomainExit(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge within {0} subdivisions")]
    NoConvergence(usize),

    /// An antiderivative path in `s` would cross the singular line s = 0.
    #[error("integration path crosses sigma = 0")]
    SignCrossing,

    /// A derivative engine could not produce the requested partials.
    #[error("partials engine failed: {0}")]
    EngineFailure(String),

    /// The fundamental tensor could not be inverted.
    #[error("fundamental tensor is singular")]
    SingularTensor,

    /// The flag spanned by (y, u) has numerically zero area.
    #[error("degenerate flag: flagpole and transverse vector are parallel")]
    DegenerateFlag,

    /// A least-squares fit had too many near-singular sample points.
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    /// Mismatched vector/matrix dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter failed validation (non-positive tolerance, c <= 0, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
