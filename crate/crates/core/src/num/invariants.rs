//! Evaluation sites and the invariant coordinates r = |x|^2, s = <x,y>/|y|.
//!
//! Every spherically symmetric quantity in this crate is a function of (r, s)
//! alone; this module converts ambient pairs (x, y) to (r, s) and supplies the
//! exact partials of r and s needed to push (r, s)-jets back to ambient
//! coordinates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A base point x and direction y in R^n. The evaluation site of every
/// tensor quantity. Curvature and spray evaluations require |y| > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPair {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

impl PointPair {
    pub fn new(x: DVector<f64>, y: DVector<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "x has length {}, y has length {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::DimensionMismatch("need dimension >= 2".into()));
        }
        if y.norm() == 0.0 {
            return Err(Error::ZeroDirection);
        }
        Ok(PointPair { x, y })
    }

    pub fn from_slices(x: &[f64], y: &[f64]) -> Result<Self> {
        PointPair::new(DVector::from_row_slice(x), DVector::from_row_slice(y))
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Angle between x and y folded to [0, pi/2]; collinear pairs (parallel
    /// or antiparallel) return values near 0. Returns pi/2 when x = 0.
    pub fn collinearity_angle(&self) -> f64 {
        let nx = self.x.norm();
        let ny = self.y.norm();
        if nx == 0.0 {
            return std::f64::consts::FRAC_PI_2;
        }
        let c = (self.x.dot(&self.y) / (nx * ny)).clamp(-1.0, 1.0);
        let theta = c.acos();
        theta.min(std::f64::consts::PI - theta)
    }
}

/// The invariant coordinates of a [`PointPair`]. Cauchy-Schwarz forces
/// s^2 <= r for any pair actually derived from ambient vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantCoords {
    pub r: f64,
    pub s: f64,
}

/// r = |x|^2, s = <x,y>/|y|.
pub fn invariants(pair: &PointPair) -> Result<InvariantCoords> {
    let ny = pair.y.norm();
    if ny == 0.0 {
        return Err(Error::ZeroDirection);
    }
    Ok(InvariantCoords {
        r: pair.x.norm_squared(),
        s: pair.x.dot(&pair.y) / ny,
    })
}

/// First and second partials of r and s with respect to the ambient
/// coordinates:
///
/// dr/dx^k = 2 x_k
/// ds/dx^k = y_k / |y|
/// ds/dy^k = (x_k |y|^2 - y_k <x,y>) / |y|^3
/// d2s/dx^j dy^k = (delta_jk |y|^2 - y_k y_j) / |y|^3
/// d2s/dy^j dy^k = -(<x,y>/|y|^3) delta_jk
///                 + (3 <x,y> y_k y_j - |y|^2 (x_k y_j + x_j y_k)) / |y|^5
///
/// r has no y-dependence and d2r/dx^j dx^k = 2 delta_jk is left implicit.
#[derive(Debug, Clone)]
pub struct InvariantPartials {
    pub r: f64,
    pub s: f64,
    pub norm_y: f64,
    pub dr_dx: DVector<f64>,
    pub ds_dx: DVector<f64>,
    pub ds_dy: DVector<f64>,
    /// indexed (j, k) = d2s / dx^j dy^k
    pub d2s_dxdy: DMatrix<f64>,
    /// indexed (j, k) = d2s / dy^j dy^k
    pub d2s_dydy: DMatrix<f64>,
}

pub fn invariant_partials(pair: &PointPair) -> Result<InvariantPartials> {
    let n = pair.dim();
    let ny = pair.y.norm();
    if ny == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let ny2 = ny * ny;
    let ny3 = ny2 * ny;
    let ny5 = ny3 * ny2;
    let xy = pair.x.dot(&pair.y);

    let dr_dx = 2.0 * &pair.x;
    let ds_dx = &pair.y / ny;
    let ds_dy = DVector::from_fn(n, |k, _| (pair.x[k] * ny2 - pair.y[k] * xy) / ny3);

    let d2s_dxdy = DMatrix::from_fn(n, n, |j, k| {
        let delta = if j == k { 1.0 } else { 0.0 };
        (delta * ny2 - pair.y[k] * pair.y[j]) / ny3
    });

    let d2s_dydy = DMatrix::from_fn(n, n, |j, k| {
        let delta = if j == k { 1.0 } else { 0.0 };
        -xy / ny3 * delta
            + (3.0 * xy * pair.y[k] * pair.y[j]
                - ny2 * (pair.x[k] * pair.y[j] + pair.x[j] * pair.y[k]))
                / ny5
    });

    Ok(InvariantPartials {
        r: pair.x.norm_squared(),
        s: xy / ny,
        norm_y: ny,
        dr_dx,
        ds_dx,
        ds_dy,
        d2s_dxdy,
        d2s_dydy,
    })
}

/// Tolerances and finite-difference steps shared across the crate.
///
/// `fd_step` is the base step for first derivatives, the classical
/// eps^(1/3) scaling. Second-derivative stencils in the jet engine use
/// `fd_step.cbrt()` (about 1.8e-2), which keeps the eps/h^2 rounding term
/// of second-difference quotients at the 1e-10 level where low-degree
/// polynomials must come out exact. Ambient-field stencils multiply that
/// by `second_step_factor`: they feed relative oracles, so truncation is
/// bought down instead. Doubly-nested differencing (curvature of a spray
/// that is itself differenced out of a metric) coarsens the factor to 0.25
/// because the outer stencil amplifies inner rounding by 1/h^2.
#[derive(Debug, Clone, Copy)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub fd_step: f64,
    pub second_step_factor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            abs_tol: 1e-7,
            rel_tol: 1e-7,
            fd_step: f64::EPSILON.cbrt(),
            second_step_factor: 0.125,
        }
    }
}

impl ToleranceConfig {
    pub fn validated(self) -> Result<Self> {
        if self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.fd_step > 0.0
            && self.second_step_factor > 0.0
        {
            Ok(self)
        } else {
            Err(Error::InvalidParameter(
                "tolerances and fd steps must be strictly positive".into(),
            ))
        }
    }

    /// First-derivative step for a coordinate scale. The base step is
    /// inflated 8x: with Richardson extrapolation the truncation term is
    /// already O(h^4), so the step is sized to push the eps/h rounding term
    /// below 1e-10 rather than to balance the plain-stencil truncation.
    pub fn step1_for_scale(&self, scale: f64) -> f64 {
        8.0 * self.fd_step * scale
    }

    /// Ambient-field second-derivative step for a coordinate scale.
    pub fn field_step2_for_scale(&self, scale: f64) -> f64 {
        self.second_step_factor * self.fd_step.cbrt() * scale
    }

    /// First-derivative step at a coordinate of magnitude |z|.
    pub fn step1(&self, z: f64) -> f64 {
        self.step1_for_scale(z.abs().max(1.0))
    }

    /// Jet-engine second-derivative step at a coordinate of magnitude |z|.
    pub fn step2(&self, z: f64) -> f64 {
        self.fd_step.cbrt() * z.abs().max(1.0)
    }
}
