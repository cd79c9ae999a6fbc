//! Spray fields, their defining-property checkers, and geodesic integration.
//!
//! A spray assigns to each (x, y) with y != 0 an n-vector of geodesic
//! coefficients G^i, positively 2-homogeneous in y. Spherically symmetric
//! sprays factor through two scalar profiles on (r, s):
//!
//!   G^i = |y| alpha(r, s) y^i + |y|^2 beta(r, s) x^i
//!
//! and the projectively flat ones have beta = 0 with alpha renamed p.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::num::invariants::{invariants, PointPair};
use crate::num::jet::Jet2;

/// A scalar profile on the invariant plane with second-order jet access.
pub trait Profile: Send + Sync {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2>;

    /// Value-only fast path; families backed by quadrature override this.
    fn value(&self, r: f64, s: f64) -> Result<f64> {
        self.jet(r, s).map(|j| j.v)
    }

    /// Spatial domain in terms of r = |x|^2 (all built-in domains are balls).
    fn r_in_domain(&self, _r: f64) -> bool {
        true
    }

    /// Full (r, s) domain; defaults to the spatial constraint alone.
    fn in_domain(&self, r: f64, _s: f64) -> bool {
        self.r_in_domain(r)
    }
}

/// Profile defined by a jet-valued expression, for tests and ad-hoc fields.
pub struct ExprProfile<F, D>
where
    F: Fn(Jet2, Jet2) -> Jet2 + Send + Sync,
    D: Fn(f64, f64) -> bool + Send + Sync,
{
    expr: F,
    domain: D,
}

impl<F, D> ExprProfile<F, D>
where
    F: Fn(Jet2, Jet2) -> Jet2 + Send + Sync,
    D: Fn(f64, f64) -> bool + Send + Sync,
{
    pub fn new(expr: F, domain: D) -> Self {
        ExprProfile { expr, domain }
    }
}

impl<F, D> Profile for ExprProfile<F, D>
where
    F: Fn(Jet2, Jet2) -> Jet2 + Send + Sync,
    D: Fn(f64, f64) -> bool + Send + Sync,
{
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        if !self.in_domain(r, s) {
            return Err(Error::DomainExit(format!(
                "profile domain excludes (r={r}, s={s})"
            )));
        }
        Ok((self.expr)(Jet2::var_r(r), Jet2::var_s(s)))
    }

    fn in_domain(&self, r: f64, s: f64) -> bool {
        (self.domain)(r, s)
    }
}

/// The zero profile (flat spray building block).
pub struct ZeroProfile;

impl Profile for ZeroProfile {
    fn jet(&self, _r: f64, _s: f64) -> Result<Jet2> {
        Ok(Jet2::ZERO)
    }
}

/// Geodesic coefficients of a spray field on (a domain of) R^n.
pub trait Spray: Send + Sync {
    fn dim(&self) -> usize;

    fn in_domain(&self, x: &DVector<f64>) -> bool;

    /// G(x, y); fails with `DomainExit` outside the domain and
    /// `ZeroDirection` at y = 0.
    fn coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>>;

    /// Characteristic spatial length for differencing engines: sprays on a
    /// small ball need proportionally smaller x-stencils to stay clear of
    /// the boundary blow-up. Capped at 1 for global sprays.
    fn x_scale(&self) -> f64 {
        1.0
    }
}

/// G^i = |y| alpha(r,s) y^i + |y|^2 beta(r,s) x^i.
pub fn eval_spherical(
    alpha: &dyn Profile,
    beta: &dyn Profile,
    pair: &PointPair,
) -> Result<DVector<f64>> {
    let ic = invariants(pair)?;
    let ny = pair.y.norm();
    let a = alpha.value(ic.r, ic.s)?;
    let b = beta.value(ic.r, ic.s)?;
    Ok(ny * a * &pair.y + ny * ny * b * &pair.x)
}

/// G^i = |y| p(r,s) y^i (projectively flat form).
pub fn eval_projective(p: &dyn Profile, pair: &PointPair) -> Result<DVector<f64>> {
    let ic = invariants(pair)?;
    let ny = pair.y.norm();
    Ok(ny * p.value(ic.r, ic.s)? * &pair.y)
}

/// Spherically symmetric spray from an (alpha, beta) profile pair.
#[derive(Clone)]
pub struct SphericalSpray {
    pub dim: usize,
    pub alpha: Arc<dyn Profile>,
    pub beta: Arc<dyn Profile>,
}

impl SphericalSpray {
    pub fn new(dim: usize, alpha: Arc<dyn Profile>, beta: Arc<dyn Profile>) -> Self {
        SphericalSpray { dim, alpha, beta }
    }
}

impl Spray for SphericalSpray {
    fn dim(&self) -> usize {
        self.dim
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.alpha.r_in_domain(x.norm_squared()) && self.beta.r_in_domain(x.norm_squared())
    }

    fn coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        let pair = PointPair::new(x.clone(), y.clone())?;
        eval_spherical(self.alpha.as_ref(), self.beta.as_ref(), &pair)
    }
}

/// Projectively flat spherically symmetric spray G^i = |y| p y^i.
#[derive(Clone)]
pub struct ProjectiveSpray {
    pub dim: usize,
    pub p: Arc<dyn Profile>,
    pub x_scale: f64,
}

impl ProjectiveSpray {
    pub fn new(dim: usize, p: Arc<dyn Profile>) -> Self {
        ProjectiveSpray {
            dim,
            p,
            x_scale: 1.0,
        }
    }

    pub fn with_x_scale(mut self, scale: f64) -> Self {
        self.x_scale = scale.clamp(0.05, 1.0);
        self
    }
}

impl Spray for ProjectiveSpray {
    fn dim(&self) -> usize {
        self.dim
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.p.r_in_domain(x.norm_squared())
    }

    fn x_scale(&self) -> f64 {
        self.x_scale
    }

    fn coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        let pair = PointPair::new(x.clone(), y.clone())?;
        eval_projective(self.p.as_ref(), &pair)
    }
}

/// Spray from a raw closure; negative controls in the test suite use this.
pub struct FnSpray<F>
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync,
{
    pub dim: usize,
    pub f: F,
}

impl<F> Spray for FnSpray<F>
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn in_domain(&self, _x: &DVector<f64>) -> bool {
        true
    }

    fn coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        if y.norm() == 0.0 {
            return Err(Error::ZeroDirection);
        }
        Ok((self.f)(x, y))
    }
}

/// ||G(x, ly) - l^2 G(x, y)|| / (1 + l^2 ||G(x, y)||).
pub fn check_homogeneity(spray: &dyn Spray, pair: &PointPair, lambda: f64) -> Result<f64> {
    let g = spray.coeffs(&pair.x, &pair.y)?;
    let g_scaled = spray.coeffs(&pair.x, &(lambda * &pair.y))?;
    let l2 = lambda * lambda;
    Ok((g_scaled - l2 * &g).norm() / (1.0 + l2 * g.norm()))
}

/// ||G(Ux, Uy) - U G(x, y)|| / (1 + ||G(x, y)||).
pub fn check_equivariance(spray: &dyn Spray, pair: &PointPair, u: &DMatrix<f64>) -> Result<f64> {
    let g = spray.coeffs(&pair.x, &pair.y)?;
    let g_rot = spray.coeffs(&(u * &pair.x), &(u * &pair.y))?;
    Ok((g_rot - u * &g).norm() / (1.0 + g.norm()))
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    DomainExit,
    ZeroVelocity,
}

/// A geodesic trajectory: times strictly increasing, |velocity| > 0
/// throughout.
#[derive(Debug, Clone)]
pub struct GeodesicTrace {
    pub times: Vec<f64>,
    pub states: Vec<(DVector<f64>, DVector<f64>)>,
    pub terminated: Termination,
}

impl GeodesicTrace {
    /// CSV with header `t,x1..xn,y1..yn`, one row per stored step.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, |(x, _)| x.len());
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x{i}"));
        }
        for i in 1..=n {
            out.push_str(&format!(",y{i}"));
        }
        out.push('\n');
        for (t, (x, y)) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t:.16e}"));
            for v in x.iter().chain(y.iter()) {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Step-size policy for [`geodesic_integrate`].
#[derive(Debug, Clone, Copy)]
pub enum StepControl {
    Fixed,
    /// Compare each full step against two half steps and bisect until the
    /// difference is below `tol` (scaled); floor guards against stalling.
    Halving {
        tol: f64,
    },
}

const MIN_SPEED: f64 = 1e-12;

fn rk4_step(
    spray: &dyn Spray,
    x: &DVector<f64>,
    y: &DVector<f64>,
    h: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let k1x = y.clone();
    let k1y = -spray.coeffs(x, y)?;
    let k2x = y + (h / 2.0) * &k1y;
    let k2y = -spray.coeffs(&(x + (h / 2.0) * &k1x), &k2x)?;
    let k3x = y + (h / 2.0) * &k2y;
    let k3y = -spray.coeffs(&(x + (h / 2.0) * &k2x), &k3x)?;
    let k4x = y + h * &k3y;
    let k4y = -spray.coeffs(&(x + h * &k3x), &k4x)?;
    Ok((
        x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    ))
}

fn controlled_step(
    spray: &dyn Spray,
    x: &DVector<f64>,
    y: &DVector<f64>,
    h: f64,
    control: StepControl,
) -> Result<(DVector<f64>, DVector<f64>)> {
    match control {
        StepControl::Fixed => rk4_step(spray, x, y, h),
        StepControl::Halving { tol } => {
            let mut h = h;
            loop {
                let full = rk4_step(spray, x, y, h)?;
                let (mx, my) = rk4_step(spray, x, y, h / 2.0)?;
                let fine = rk4_step(spray, &mx, &my, h / 2.0)?;
                let scale = 1.0 + x.norm() + y.norm();
                let diff = ((&full.0 - &fine.0).norm() + (&full.1 - &fine.1).norm()) / scale;
                if diff <= tol || h <= 1e-8 {
                    return Ok(fine);
                }
                h /= 2.0;
            }
        }
    }
}

/// Classical RK4 on the first-order system (dx/dt = y, dy/dt = -G(x, y)).
///
/// A domain exit or a collapse of |y| below 1e-12 ends the trace early with
/// the reason recorded; the partial trace is still returned.
pub fn geodesic_integrate(
    spray: &dyn Spray,
    x0: &DVector<f64>,
    y0: &DVector<f64>,
    t_end: f64,
    step: f64,
    control: StepControl,
) -> Result<GeodesicTrace> {
    if y0.norm() == 0.0 {
        return Err(Error::ZeroDirection);
    }
    if step <= 0.0 || t_end <= 0.0 {
        return Err(Error::InvalidParameter("need step > 0 and T > 0".into()));
    }
    if !spray.in_domain(x0) {
        return Err(Error::DomainExit(
            "geodesic start lies outside the spray domain".into(),
        ));
    }

    let mut times = vec![0.0];
    let mut states = vec![(x0.clone(), y0.clone())];
    let mut terminated = Termination::Completed;

    let steps = (t_end / step).ceil() as usize;
    let mut t = 0.0;
    let (mut x, mut y) = (x0.clone(), y0.clone());

    for _ in 0..steps {
        let h = step.min(t_end - t);
        if h <= 0.0 {
            break;
        }
        match controlled_step(spray, &x, &y, h, control) {
            Ok((nx, ny)) => {
                if !spray.in_domain(&nx) {
                    terminated = Termination::DomainExit;
                    break;
                }
                if ny.norm() < MIN_SPEED {
                    terminated = Termination::ZeroVelocity;
                    break;
                }
                x = nx;
                y = ny;
                t += h;
                times.push(t);
                states.push((x.clone(), y.clone()));
            }
            Err(Error::DomainExit(_)) => {
                // a stage evaluation left the domain mid-step
                terminated = Termination::DomainExit;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    Ok(GeodesicTrace {
        times,
        states,
        terminated,
    })
}

/// Max distance from the trace to the line x0 + span{v0}, over (1 + length).
///
/// Distance-to-line is used rather than angles; it stays well-conditioned
/// when the deviation is near zero.
pub fn straightness_deviation(trace: &GeodesicTrace) -> f64 {
    if trace.states.len() < 2 {
        return 0.0;
    }
    let (x0, v0) = &trace.states[0];
    let dir = v0 / v0.norm();
    let mut max_dist = 0.0f64;
    let mut length = 0.0f64;
    let mut prev = x0.clone();
    for (x, _) in &trace.states {
        let rel = x - x0;
        let off = &rel - rel.dot(&dir) * &dir;
        max_dist = max_dist.max(off.norm());
        length += (x - &prev).norm();
        prev = x.clone();
    }
    max_dist / (1.0 + length)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(dim: usize) -> ProjectiveSpray {
        ProjectiveSpray::new(dim, Arc::new(ZeroProfile))
    }

    #[test]
    fn spherical_evaluation_cases() {
        // alpha = 0, beta = 0 -> G = 0
        let pair = PointPair::from_slices(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        let g = eval_spherical(&ZeroProfile, &ZeroProfile, &pair).unwrap();
        assert_eq!(g.norm(), 0.0);

        // space-form alpha = -s/(1+r), beta = 0 at x=(1,0), y=(1,0)
        let alpha = ExprProfile::new(|r, s| -s / (r + 1.0), |_, _| true);
        let g = eval_spherical(&alpha, &ZeroProfile, &pair).unwrap();
        assert!((g[0] + 0.5).abs() < 1e-15);
        assert!(g[1].abs() < 1e-15);

        // beta = 1, alpha = 0, x=(1,0), y=(0,2) -> G = (4, 0)
        let pair = PointPair::from_slices(&[1.0, 0.0], &[0.0, 2.0]).unwrap();
        let one = ExprProfile::new(|_, _| Jet2::constant(1.0), |_, _| true);
        let g = eval_spherical(&ZeroProfile, &one, &pair).unwrap();
        assert!((g[0] - 4.0).abs() < 1e-15);
        assert!(g[1].abs() < 1e-15);
    }

    #[test]
    fn projective_evaluation_cases() {
        let pair = PointPair::from_slices(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        let g = eval_projective(&ZeroProfile, &pair).unwrap();
        assert_eq!(g.norm(), 0.0);

        // p = 1 -> G = |y| y
        let one = ExprProfile::new(|_, _| Jet2::constant(1.0), |_, _| true);
        let g = eval_projective(&one, &pair).unwrap();
        assert!((g[0] - 15.0).abs() < 1e-12);
        assert!((g[1] - 20.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneity_flat_and_broken() {
        let pair = PointPair::from_slices(&[0.3, 0.1], &[1.0, 0.5]).unwrap();
        let res = check_homogeneity(&flat(2), &pair, 2.0).unwrap();
        assert_eq!(res, 0.0);

        // G^i = y^i is 1-homogeneous, not 2-homogeneous
        let broken = FnSpray {
            dim: 2,
            f: |_: &DVector<f64>, y: &DVector<f64>| y.clone(),
        };
        let res = check_homogeneity(&broken, &pair, 2.0).unwrap();
        assert!(res > 0.1, "residual {res}");
    }

    #[test]
    fn equivariance_identity_and_counterexample() {
        let pair = PointPair::from_slices(&[0.4, -0.2, 0.1], &[0.3, 1.0, -0.5]).unwrap();
        let eye = DMatrix::identity(3, 3);
        assert_eq!(check_equivariance(&flat(3), &pair, &eye).unwrap(), 0.0);

        // G^1 = (y^1)^2, rest zero: not equivariant. Search random
        // orthogonal maps for a witness exceeding the threshold.
        let lopsided = FnSpray {
            dim: 3,
            f: |_: &DVector<f64>, y: &DVector<f64>| {
                let mut g = DVector::zeros(3);
                g[0] = y[0] * y[0];
                g
            },
        };
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let worst = (0..20)
            .map(|_| {
                let u = crate::num::random_orthogonal(3, &mut rng);
                check_equivariance(&lopsided, &pair, &u).unwrap()
            })
            .fold(0.0f64, f64::max);
        assert!(worst > 0.1, "best witness residual {worst}");
    }

    #[test]
    fn flat_geodesic_is_straight_line() {
        let spray = flat(2);
        let x0 = DVector::from_row_slice(&[0.0, 0.0]);
        let y0 = DVector::from_row_slice(&[1.0, 0.0]);
        let trace = geodesic_integrate(&spray, &x0, &y0, 1.0, 1e-3, StepControl::Fixed).unwrap();
        assert_eq!(trace.terminated, Termination::Completed);
        let (xf, _) = trace.states.last().unwrap();
        assert!((xf[0] - 1.0).abs() <= 1e-12);
        assert!(xf[1].abs() <= 1e-12);
        assert!(straightness_deviation(&trace) <= 1e-12);
    }

    #[test]
    fn csv_layout() {
        let spray = flat(2);
        let x0 = DVector::from_row_slice(&[0.0, 0.0]);
        let y0 = DVector::from_row_slice(&[1.0, 0.0]);
        let trace = geodesic_integrate(&spray, &x0, &y0, 0.01, 1e-3, StepControl::Fixed).unwrap();
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,x1,x2,y1,y2");
        assert_eq!(csv.lines().count(), trace.times.len() + 1);
    }

    #[test]
    fn zero_step_rejected() {
        let spray = flat(2);
        let x0 = DVector::from_row_slice(&[0.0, 0.0]);
        let y0 = DVector::from_row_slice(&[1.0, 0.0]);
        assert!(geodesic_integrate(&spray, &x0, &y0, 1.0, 0.0, StepControl::Fixed).is_err());
    }
}
