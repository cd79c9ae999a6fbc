//! Spherically symmetric sprays: construction, curvature two independent
//! ways, residual-based classification (zero / isotropic / weakly isotropic
//! / scalar), closed-form solution families, and Finsler-metric
//! cross-checks.

pub mod curvature;
pub mod error;
pub mod families;
pub mod finsler;
pub mod num;
pub mod sample;
pub mod spray;
pub mod weakiso;

pub use error::{Error, Result};
pub use num::{invariants, PointPair, ToleranceConfig};
