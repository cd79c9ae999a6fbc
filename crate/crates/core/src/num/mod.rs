//! Foundational numerics: invariant coordinates, second-order jets, the
//! differencing engine, quadrature, and orthogonal-group sampling.
//!
//! Everything here is pure and reentrant; randomness lives in caller-owned
//! seeded generators.

pub mod fd;
pub mod haar;
pub mod invariants;
pub mod jet;
pub mod quad;
pub mod spline;

pub use fd::{fd_jet2, Field};
pub use haar::random_orthogonal;
pub use invariants::{
    invariant_partials, invariants, InvariantCoords, InvariantPartials, PointPair, ToleranceConfig,
};
pub use jet::Jet2;
pub use quad::quad;
