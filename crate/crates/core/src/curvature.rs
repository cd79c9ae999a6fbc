//! Riemann curvature of sprays, two independent ways, and the residual
//! systems that classify projectively flat spherically symmetric sprays.
//!
//! The general route assembles
//!
//!   R^i_k = 2 G^i_{x^k} - G^i_{x^j y^k} y^j + 2 G^j G^i_{y^j y^k}
//!           - G^i_{y^j} G^j_{y^k}
//!
//! from an engine that supplies the spray partials (finite differences for
//! arbitrary sprays, exact chain-rule jets for projective profiles). The
//! closed route evaluates the compact expression the general one reduces to
//! for G^i = |y| p(r,s) y^i. Each route is the other's oracle: nothing here
//! is trusted untested.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::num::fd::Field;
use crate::num::invariants::{invariant_partials, invariants, PointPair, ToleranceConfig};
use crate::num::jet::Jet2;
use crate::sample::SamplePlan;
use crate::spray::{Profile, Spray};

/// The curvature operator R^i_k at a fixed pair; row index i is the upper
/// index.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    pub at: PointPair,
    pub matrix: DMatrix<f64>,
}

impl CurvatureTensor {
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Flagpole annihilation defect: every spray curvature contracts to zero
    /// against y. Returns max_i |sum_k R^i_k y^k| / (|y|^2 (1 + ||R||)).
    pub fn flagpole_defect(&self) -> f64 {
        let contracted = &self.matrix * &self.at.y;
        let ny2 = self.at.y.norm_squared();
        contracted.amax() / (ny2 * (1.0 + self.max_abs()))
    }
}

/// Max-norm difference scaled by the reference: ||a - b|| / (1 + ||b||).
pub fn matrix_rel_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (va, vb) in a.iter().zip(b.iter()) {
        diff = diff.max((va - vb).abs());
        scale = scale.max(vb.abs());
    }
    diff / (1.0 + scale)
}

/// Value and partials of the geodesic coefficients at one pair, everything
/// the curvature definition consumes.
pub struct SprayJet {
    /// G^i
    pub g: DVector<f64>,
    /// (i, k) -> dG^i/dx^k
    pub gx: DMatrix<f64>,
    /// (i, k) -> dG^i/dy^k
    pub gy: DMatrix<f64>,
    /// indexed by i, then (j, k) -> d2 G^i / dx^j dy^k
    pub gxy: Vec<DMatrix<f64>>,
    /// indexed by i, then (j, k) -> d2 G^i / dy^j dy^k
    pub gyy: Vec<DMatrix<f64>>,
}

/// Supplies spray partials to the general curvature route.
pub trait CurvatureEngine {
    fn dim(&self) -> usize;
    fn spray_jet(&self, pair: &PointPair) -> Result<SprayJet>;
}

/// Richardson-extrapolated central differences of an arbitrary spray.
pub struct FdSprayEngine<'a> {
    pub spray: &'a dyn Spray,
    pub cfg: ToleranceConfig,
}

impl<'a> FdSprayEngine<'a> {
    pub fn new(spray: &'a dyn Spray) -> Self {
        FdSprayEngine {
            spray,
            cfg: ToleranceConfig::default(),
        }
    }
}

impl CurvatureEngine for FdSprayEngine<'_> {
    fn dim(&self) -> usize {
        self.spray.dim()
    }

    fn spray_jet(&self, pair: &PointPair) -> Result<SprayJet> {
        let n = pair.dim();
        let g = self.spray.coeffs(&pair.x, &pair.y)?;

        // components as scalar fields on z = (x, y) in R^{2n}
        let mut z0 = Vec::with_capacity(2 * n);
        z0.extend(pair.x.iter());
        z0.extend(pair.y.iter());

        let mut gx = DMatrix::zeros(n, n);
        let mut gy = DMatrix::zeros(n, n);
        let mut gxy = vec![DMatrix::zeros(n, n); n];
        let mut gyy = vec![DMatrix::zeros(n, n); n];

        // x-steps scale with max(x_scale, |x_k|), shrinking on small domain
        // balls; y-steps with |y|, the natural scale of a 2-homogeneous
        // field in y
        let x_scale = self.spray.x_scale();
        let ny = pair.y.norm();
        let mut scales = Vec::with_capacity(2 * n);
        scales.extend(pair.x.iter().map(|v| v.abs().max(x_scale)));
        scales.extend(std::iter::repeat_n(ny, n));

        for i in 0..n {
            let component = |z: &[f64]| {
                let x = DVector::from_row_slice(&z[..n]);
                let y = DVector::from_row_slice(&z[n..]);
                match self.spray.coeffs(&x, &y) {
                    Ok(v) => v[i],
                    Err(_) => f64::NAN, // surfaces as EngineFailure below
                }
            };
            let field = Field::with_scales(&component, &self.cfg, scales.clone());
            for k in 0..n {
                gx[(i, k)] = field.d1(&z0, k);
                gy[(i, k)] = field.d1(&z0, n + k);
                for j in 0..n {
                    gxy[i][(j, k)] = field.d2(&z0, j, n + k);
                    if j <= k {
                        let v = field.d2(&z0, n + j, n + k);
                        gyy[i][(j, k)] = v;
                        gyy[i][(k, j)] = v;
                    }
                }
            }
        }

        let jet = SprayJet {
            g,
            gx,
            gy,
            gxy,
            gyy,
        };
        let finite = jet.gx.iter().all(|v| v.is_finite())
            && jet.gy.iter().all(|v| v.is_finite())
            && jet.gxy.iter().all(|m| m.iter().all(|v| v.is_finite()))
            && jet.gyy.iter().all(|m| m.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::EngineFailure(
                "finite-difference stencil produced non-finite spray partials \
                 (likely a domain exit)"
                    .into(),
            ));
        }
        Ok(jet)
    }
}

/// Exact spray partials for G^i = |y| p(r,s) y^i, chained through the
/// partials of r and s:
///
///   G^i_{x^k}     = y^i |y| (r_{x^k} p_r + s_{x^k} p_s)
///   G^i_{y^k}     = (y_k/|y| y^i + |y| d^i_k) p + y^i |y| s_{y^k} p_s
///   G^i_{x^j y^k} = (y_k/|y| y^i + |y| d^i_k)(r_{x^j} p_r + s_{x^j} p_s)
///                   + y^i |y| (r_{x^j} s_{y^k} p_rs + s_{x^j} s_{y^k} p_ss
///                              + s_{x^j y^k} p_s)
///   G^i_{y^j y^k} = (y_k/|y| d^i_j + y_j/|y| d^i_k
///                    + y^i (d_kj |y|^2 - y_k y_j)/|y|^3) p
///                   + y^i |y| s_{y^k} s_{y^j} p_ss
///                   + [ y^i/|y| (y_j s_{y^k} + y_k s_{y^j})
///                       + |y| (d^i_k s_{y^j} + d^i_j s_{y^k})
///                       + y^i |y| s_{y^j y^k} ] p_s
pub struct ProjectiveJetEngine<'a> {
    pub profile: &'a dyn Profile,
    pub dim: usize,
}

impl CurvatureEngine for ProjectiveJetEngine<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn spray_jet(&self, pair: &PointPair) -> Result<SprayJet> {
        let n = pair.dim();
        let ip = invariant_partials(pair)?;
        let p = self.profile.jet(ip.r, ip.s)?;
        let ny = ip.norm_y;
        let y = &pair.y;
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };

        let g = DVector::from_fn(n, |i, _| ny * p.v * y[i]);

        let gx = DMatrix::from_fn(n, n, |i, k| {
            y[i] * ny * (ip.dr_dx[k] * p.d_r + ip.ds_dx[k] * p.d_s)
        });

        let gy = DMatrix::from_fn(n, n, |i, k| {
            (y[k] / ny * y[i] + ny * delta(i, k)) * p.v + y[i] * ny * ip.ds_dy[k] * p.d_s
        });

        let mut gxy = Vec::with_capacity(n);
        let mut gyy = Vec::with_capacity(n);
        for i in 0..n {
            gxy.push(DMatrix::from_fn(n, n, |j, k| {
                (y[k] / ny * y[i] + ny * delta(i, k)) * (ip.dr_dx[j] * p.d_r + ip.ds_dx[j] * p.d_s)
                    + y[i]
                        * ny
                        * (ip.dr_dx[j] * ip.ds_dy[k] * p.d_rs
                            + ip.ds_dx[j] * ip.ds_dy[k] * p.d_ss
                            + ip.d2s_dxdy[(j, k)] * p.d_s)
            }));
            gyy.push(DMatrix::from_fn(n, n, |j, k| {
                (y[k] / ny * delta(i, j)
                    + y[j] / ny * delta(i, k)
                    + y[i] * (delta(k, j) * ny * ny - y[k] * y[j]) / (ny * ny * ny))
                    * p.v
                    + y[i] * ny * ip.ds_dy[k] * ip.ds_dy[j] * p.d_ss
                    + (y[i] / ny * (y[j] * ip.ds_dy[k] + y[k] * ip.ds_dy[j])
                        + ny * (delta(i, k) * ip.ds_dy[j] + delta(i, j) * ip.ds_dy[k])
                        + y[i] * ny * ip.d2s_dydy[(j, k)])
                        * p.d_s
            }));
        }

        Ok(SprayJet {
            g,
            gx,
            gy,
            gxy,
            gyy,
        })
    }
}

/// Curvature from the definition, using whatever partials the engine
/// supplies. No symmetrization is applied.
pub fn riemann_generic(engine: &dyn CurvatureEngine, pair: &PointPair) -> Result<CurvatureTensor> {
    let n = pair.dim();
    if engine.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "engine dim {} vs pair dim {n}",
            engine.dim()
        )));
    }
    let jet = engine.spray_jet(pair)?;
    let y = &pair.y;

    let matrix = DMatrix::from_fn(n, n, |i, k| {
        let mut v = 2.0 * jet.gx[(i, k)];
        for j in 0..n {
            v -= jet.gxy[i][(j, k)] * y[j];
            v += 2.0 * jet.g[j] * jet.gyy[i][(j, k)];
            v -= jet.gy[(i, j)] * jet.gy[(j, k)];
        }
        v
    });

    Ok(CurvatureTensor {
        at: pair.clone(),
        matrix,
    })
}

/// The coefficient bundle the closed form is written in:
///
///   R_s = p^2 - 2 s p_r - p_s              (scalar part over |y|^2)
///   A   = p p_s + 2 s p_rs - 4 p_r + p_ss  (x_k coefficient)
///   B   = (s p + 1) p_s + 2 s (s p_rs - p_r) + s p_ss - p^2
///
/// with s A - B = R_s as a pure algebraic identity.
struct ClosedCoeffs {
    r_s: f64,
    a: f64,
    b: f64,
}

fn closed_coeffs(p: &Jet2, s: f64) -> ClosedCoeffs {
    ClosedCoeffs {
        r_s: p.v * p.v - 2.0 * s * p.d_r - p.d_s,
        a: p.v * p.d_s + 2.0 * s * p.d_rs - 4.0 * p.d_r + p.d_ss,
        b: (s * p.v + 1.0) * p.d_s + 2.0 * s * (s * p.d_rs - p.d_r) + s * p.d_ss - p.v * p.v,
    }
}

/// Closed-form curvature of a projective spray:
///
///   R^i_k = |y|^2 R_s d^i_k - { |y| A x_k - B y_k } y^i.
pub fn riemann_projective_closed(p: &dyn Profile, pair: &PointPair) -> Result<CurvatureTensor> {
    let ic = invariants(pair)?;
    let jet = p.jet(ic.r, ic.s)?;
    let c = closed_coeffs(&jet, ic.s);
    let ny = pair.y.norm();
    let n = pair.dim();

    let matrix = DMatrix::from_fn(n, n, |i, k| {
        let mut v = 0.0;
        if i == k {
            v += ny * ny * c.r_s;
        }
        v - (ny * c.a * pair.x[k] - c.b * pair.y[k]) * pair.y[i]
    });

    Ok(CurvatureTensor {
        at: pair.clone(),
        matrix,
    })
}

/// Scalar-curvature data R and tau_k with R^i_k = R d^i_k - tau_k y^i.
#[derive(Debug, Clone)]
pub struct ScalarData {
    /// R = |y|^2 (p^2 - 2 s p_r - p_s)
    pub r_scalar: f64,
    /// tau_k = |y| A x_k - B y_k
    pub tau: DVector<f64>,
}

impl ScalarData {
    /// |sum_k tau_k y^k - R| / (1 + |R|); zero up to rounding by algebra.
    pub fn contraction_defect(&self, y: &DVector<f64>) -> f64 {
        (self.tau.dot(y) - self.r_scalar).abs() / (1.0 + self.r_scalar.abs())
    }
}

pub fn scalar_data(p: &dyn Profile, pair: &PointPair) -> Result<ScalarData> {
    let ic = invariants(pair)?;
    let jet = p.jet(ic.r, ic.s)?;
    let c = closed_coeffs(&jet, ic.s);
    let ny = pair.y.norm();
    let tau = DVector::from_fn(pair.dim(), |k, _| ny * c.a * pair.x[k] - c.b * pair.y[k]);
    Ok(ScalarData {
        r_scalar: ny * ny * c.r_s,
        tau,
    })
}

/// Analytic y-gradient of the curvature trace:
///
///   (R^m_m)_{y^k} = (n-1) [ |y| (2 p p_s - 2 s p_rs - 2 p_r - p_ss) x_k
///                   + (2 (p^2 - (s p + 1) p_s + s (s p_rs - p_r)) + s p_ss) y_k ]
pub fn trace_gradient(p: &dyn Profile, pair: &PointPair) -> Result<DVector<f64>> {
    let ic = invariants(pair)?;
    let j = p.jet(ic.r, ic.s)?;
    let ny = pair.y.norm();
    let nm1 = (pair.dim() - 1) as f64;
    let s = ic.s;
    let cx = 2.0 * j.v * j.d_s - 2.0 * s * j.d_rs - 2.0 * j.d_r - j.d_ss;
    let cy = 2.0 * (j.v * j.v - (s * j.v + 1.0) * j.d_s + s * (s * j.d_rs - j.d_r)) + s * j.d_ss;
    Ok(DVector::from_fn(pair.dim(), |k, _| {
        nm1 * (ny * cx * pair.x[k] + cy * pair.y[k])
    }))
}

/// The single scalar controlling isotropy: s p_rs - p_r + p_ss / 2.
pub fn isotropic_residual(p_jet: &Jet2, s: f64) -> f64 {
    s * p_jet.d_rs - p_jet.d_r + 0.5 * p_jet.d_ss
}

/// Defect of the isotropic form: the closed-form curvature minus its
/// trace-rebuilt isotropic shape,
///
///   R^i_k - [ R^m_m/(n-1) d^i_k - (R^m_m)_{y^k}/(2(n-1)) y^i ],
///
/// which collapses to 3 (s p_rs - p_r + p_ss/2)(s y_k - |y| x_k) y^i.
pub fn isotropic_defect_tensor(p: &dyn Profile, pair: &PointPair) -> Result<DMatrix<f64>> {
    let n = pair.dim();
    let nm1 = (n - 1) as f64;
    let full = riemann_projective_closed(p, pair)?.matrix;
    let trace = full.trace();
    let tgrad = trace_gradient(p, pair)?;
    Ok(DMatrix::from_fn(n, n, |i, k| {
        let mut iso = -tgrad[k] / (2.0 * nm1) * pair.y[i];
        if i == k {
            iso += trace / nm1;
        }
        full[(i, k)] - iso
    }))
}

/// The right-hand side the defect must equal; kept separate so tests can
/// compare the two routes.
pub fn isotropic_defect_rhs(p_jet: &Jet2, pair: &PointPair) -> Result<DMatrix<f64>> {
    let ic = invariants(pair)?;
    let ny = pair.y.norm();
    let c5 = isotropic_residual(p_jet, ic.s);
    let n = pair.dim();
    Ok(DMatrix::from_fn(n, n, |i, k| {
        3.0 * c5 * (ic.s * pair.y[k] - ny * pair.x[k]) * pair.y[i]
    }))
}

/// The three polynomial residuals whose joint vanishing is zero curvature.
/// The third is dependent: c10 = s c9 - c8 identically.
pub fn zero_residuals(p_jet: &Jet2, s: f64) -> (f64, f64, f64) {
    let p = p_jet;
    let c8 = p.v * p.v - 2.0 * s * p.d_r - p.d_s;
    let c9 = p.v * p.d_s + 2.0 * s * p.d_rs - 4.0 * p.d_r + p.d_ss;
    let c10 = (s * p.v + 1.0) * p.d_s + 2.0 * s * (s * p.d_rs - p.d_r) + s * p.d_ss - p.v * p.v;
    (c8, c9, c10)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
}

impl ResidualStats {
    fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return ResidualStats::default();
        }
        ResidualStats {
            max: values.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            mean: values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Zero,
    IsotropicNonzero,
    ScalarOnly,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Zero => "zero",
            Verdict::IsotropicNonzero => "isotropic_nonzero",
            Verdict::ScalarOnly => "scalar_only",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// Residual sweep over a sample plan plus the verdict drawn from it.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub samples: usize,
    pub residual_c5: ResidualStats,
    pub residual_c8: ResidualStats,
    pub residual_c9: ResidualStats,
    pub residual_c10: ResidualStats,
    /// max over samples of |R^m_m| / |y|^2
    pub trace_scale_max: f64,
    pub verdict: Verdict,
}

/// Sweep the residual systems over the plan and classify.
///
/// Residuals are normalized per sample by the sum 1 + |p| + |p_r| + |p_s|
/// plus the second partials, so the thresholds are scale-free across
/// families. Verdicts: zero when the (c8, c9) pair vanishes;
/// isotropic_nonzero when only the isotropy residual vanishes but the trace
/// does not; scalar_only otherwise (a projectively flat spray is always of
/// scalar curvature). Residuals within a factor 10 of a threshold give
/// indeterminate rather than a confident call.
pub fn classify(
    p: &dyn Profile,
    plan: &SamplePlan,
    cfg: &ToleranceConfig,
) -> Result<ResidualReport> {
    let mut c5s = Vec::with_capacity(plan.count);
    let mut c8s = Vec::with_capacity(plan.count);
    let mut c9s = Vec::with_capacity(plan.count);
    let mut c10s = Vec::with_capacity(plan.count);
    let mut trace_scale_max = 0.0f64;

    let pairs = plan.pairs();
    let nm1 = (plan.dim - 1) as f64;
    for pair in &pairs {
        let ic = invariants(pair)?;
        let jet = p.jet(ic.r, ic.s)?;
        let scale =
            1.0 + jet.v.abs() + jet.d_r.abs() + jet.d_s.abs() + jet.d_rs.abs() + jet.d_ss.abs();
        let c5 = isotropic_residual(&jet, ic.s);
        let (c8, c9, c10) = zero_residuals(&jet, ic.s);
        c5s.push(c5 / scale);
        c8s.push(c8 / scale);
        c9s.push(c9 / scale);
        c10s.push(c10 / scale);
        // R^m_m / |y|^2 = (n-1)(p^2 - 2 s p_r - p_s) = (n-1) c8
        trace_scale_max = trace_scale_max.max((nm1 * c8).abs());
    }

    let c5_stats = ResidualStats::from_values(&c5s);
    let c8_stats = ResidualStats::from_values(&c8s);
    let c9_stats = ResidualStats::from_values(&c9s);
    let c10_stats = ResidualStats::from_values(&c10s);

    let tol = cfg.abs_tol;
    let zero_band = c8_stats.max.max(c9_stats.max);
    let verdict = if zero_band <= tol {
        Verdict::Zero
    } else if zero_band <= 10.0 * tol {
        Verdict::Indeterminate
    } else if c5_stats.max <= tol {
        if trace_scale_max > 10.0 * tol {
            Verdict::IsotropicNonzero
        } else {
            Verdict::Indeterminate
        }
    } else if c5_stats.max <= 10.0 * tol {
        Verdict::Indeterminate
    } else {
        Verdict::ScalarOnly
    };

    Ok(ResidualReport {
        samples: pairs.len(),
        residual_c5: c5_stats,
        residual_c8: c8_stats,
        residual_c9: c9_stats,
        residual_c10: c10_stats,
        trace_scale_max,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spray::{ExprProfile, ProjectiveSpray, ZeroProfile};
    use std::sync::Arc;

    #[test]
    fn flat_spray_curvature_vanishes_both_routes() {
        let pair = PointPair::from_slices(&[0.4, 0.1, -0.2], &[1.0, 0.3, 0.7]).unwrap();
        let spray = ProjectiveSpray::new(3, Arc::new(ZeroProfile));
        let fd = FdSprayEngine::new(&spray);
        let r1 = riemann_generic(&fd, &pair).unwrap();
        assert!(r1.max_abs() < 1e-9, "{}", r1.max_abs());
        let r2 = riemann_projective_closed(&ZeroProfile, &pair).unwrap();
        assert_eq!(r2.max_abs(), 0.0);
    }

    #[test]
    fn space_form_curvature_at_origin() {
        // p = -s/(1+r) at x = 0: R^i_k = |y|^2 d^i_k - y^i y_k
        let p = ExprProfile::new(|r, s| -s / (r + 1.0), |_, _| true);
        let pair = PointPair::from_slices(&[0.0, 0.0, 0.0], &[0.6, -0.2, 1.1]).unwrap();
        let r = riemann_projective_closed(&p, &pair).unwrap();
        let ny2 = pair.y.norm_squared();
        for i in 0..3 {
            for k in 0..3 {
                let want = if i == k { ny2 } else { 0.0 } - pair.y[i] * pair.y[k];
                assert!((r.matrix[(i, k)] - want).abs() < 1e-12);
            }
        }
        // and the definition agrees through the analytic engine
        let engine = ProjectiveJetEngine {
            profile: &p,
            dim: 3,
        };
        let r_def = riemann_generic(&engine, &pair).unwrap();
        assert!(matrix_rel_error(&r_def.matrix, &r.matrix) < 1e-12);
    }

    #[test]
    fn generic_vs_closed_nontrivial_profile() {
        // p = s^2 + r s + r: generic quadratic, no special curvature
        let p = ExprProfile::new(|r, s| s * s + r * s + r, |_, _| true);
        let pair = PointPair::from_slices(&[0.5, -0.3], &[0.9, 0.4]).unwrap();
        let closed = riemann_projective_closed(&p, &pair).unwrap();

        let analytic = ProjectiveJetEngine {
            profile: &p,
            dim: 2,
        };
        let r_analytic = riemann_generic(&analytic, &pair).unwrap();
        assert!(matrix_rel_error(&r_analytic.matrix, &closed.matrix) < 1e-10);

        let spray = ProjectiveSpray::new(
            2,
            Arc::new(ExprProfile::new(|r, s| s * s + r * s + r, |_, _| true)),
        );
        let fd = FdSprayEngine::new(&spray);
        let r_fd = riemann_generic(&fd, &pair).unwrap();
        assert!(matrix_rel_error(&r_fd.matrix, &closed.matrix) < 1e-6);
    }

    #[test]
    fn flagpole_annihilation() {
        let p = ExprProfile::new(|r, s| (r + 1.0).sqrt() * s + r, |_, _| true);
        for pair in SamplePlan::new(3, 20, 13, 0.8).pairs() {
            let r = riemann_projective_closed(&p, &pair).unwrap();
            assert!(r.flagpole_defect() <= 1e-12);
        }
    }

    #[test]
    fn isotropic_residual_cases() {
        // p = s: linear in s, all relevant partials vanish
        let jet = Jet2 {
            v: 1.3,
            d_r: 0.0,
            d_s: 1.0,
            d_rr: 0.0,
            d_rs: 0.0,
            d_ss: 0.0,
        };
        assert_eq!(isotropic_residual(&jet, 1.3), 0.0);

        // quadratic family p = s^2 + (r + c)s + r - c1 satisfies it identically
        let p = ExprProfile::new(|r, s| s * s + (r + 0.7) * s + r - 0.3, |_, _| true);
        for (r, s) in SamplePlan::rs_samples(50, 3, (0.1, 1.0)) {
            let j = p.jet(r, s).unwrap();
            assert!(isotropic_residual(&j, s).abs() < 1e-13);
        }

        // p = r: residual is identically -1
        let jet = Jet2 {
            v: 2.0,
            d_r: 1.0,
            d_s: 0.0,
            d_rr: 0.0,
            d_rs: 0.0,
            d_ss: 0.0,
        };
        assert_eq!(isotropic_residual(&jet, 0.4), -1.0);
    }

    #[test]
    fn defect_tensor_hand_case() {
        // p = r at x=(1,0), y=(0,1): defect = 3 x_k y^i, single entry at (2,1)
        let p = ExprProfile::new(|r, _| r, |_, _| true);
        let pair = PointPair::from_slices(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        let d = isotropic_defect_tensor(&p, &pair).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let want = if i == 1 && k == 0 { 3.0 } else { 0.0 };
                assert!(
                    (d[(i, k)] - want).abs() < 1e-12,
                    "({i},{k}) = {}",
                    d[(i, k)]
                );
            }
        }
        // and it matches the displayed right-hand side
        let jet = p.jet(1.0, 0.0).unwrap();
        let rhs = isotropic_defect_rhs(&jet, &pair).unwrap();
        assert!(matrix_rel_error(&d, &rhs) < 1e-12);
    }

    #[test]
    fn defect_identity_for_arbitrary_profiles() {
        // structural identity: lhs == rhs for any smooth p
        let profiles: Vec<Box<dyn Profile>> = vec![
            Box::new(ExprProfile::new(|r, s| r * s * s + s, |_, _| true)),
            Box::new(ExprProfile::new(
                |r, s| (r - s * s + 2.0).sqrt(),
                |_, _| true,
            )),
            Box::new(ExprProfile::new(
                |r, s| (r * 0.3 - s * 0.5).exp(),
                |_, _| true,
            )),
        ];
        for p in &profiles {
            for pair in SamplePlan::new(3, 30, 17, 0.9).pairs() {
                let lhs = isotropic_defect_tensor(p.as_ref(), &pair).unwrap();
                let ic = invariants(&pair).unwrap();
                let jet = p.jet(ic.r, ic.s).unwrap();
                let rhs = isotropic_defect_rhs(&jet, &pair).unwrap();
                assert!(
                    matrix_rel_error(&lhs, &rhs) < 1e-8,
                    "defect mismatch {}",
                    matrix_rel_error(&lhs, &rhs)
                );
            }
        }
    }

    #[test]
    fn dependency_identity_c10() {
        // c10 = s c9 - c8 for arbitrary jets: pure algebra
        let jets = [
            Jet2::new(0.7, -0.3, 1.2, 0.1, -0.9, 2.1),
            Jet2::new(-1.1, 0.6, 0.4, -2.0, 0.8, -0.5),
            Jet2::new(2.3, 1.9, -1.4, 0.0, 0.3, 1.7),
        ];
        for (i, jet) in jets.iter().enumerate() {
            let s = 0.3 + 0.4 * i as f64;
            let (c8, c9, c10) = zero_residuals(jet, s);
            assert!((c10 - (s * c9 - c8)).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_data_contraction() {
        let p = ExprProfile::new(|r, s| s * s * 0.4 + r * 0.9 + s, |_, _| true);
        for pair in SamplePlan::new(4, 25, 23, 1.1).pairs() {
            let sd = scalar_data(&p, &pair).unwrap();
            assert!(sd.contraction_defect(&pair.y) <= 1e-12);
        }
    }

    #[test]
    fn trace_gradient_matches_differenced_trace() {
        // cross-check the analytic display against differencing R^m_m in y
        let p = ExprProfile::new(|r, s| s * s + r * s + (r + 1.5).sqrt(), |_, _| true);
        let pair = PointPair::from_slices(&[0.4, -0.1, 0.3], &[0.8, 0.5, -0.6]).unwrap();
        let grad = trace_gradient(&p, &pair).unwrap();
        let cfg = ToleranceConfig::default();
        let trace_at = |z: &[f64]| {
            let pr = PointPair::from_slices(&[0.4, -0.1, 0.3], z).unwrap();
            riemann_projective_closed(&p, &pr).unwrap().matrix.trace()
        };
        let field = Field::new(&trace_at, &cfg);
        let y0 = [0.8, 0.5, -0.6];
        for k in 0..3 {
            let fd = field.d1(&y0, k);
            assert!(
                (grad[k] - fd).abs() / (1.0 + fd.abs()) < 1e-7,
                "k={k}: analytic {} vs fd {fd}",
                grad[k]
            );
        }
    }

    #[test]
    fn classify_flat_scalar_only_and_isotropic() {
        let cfg = ToleranceConfig::default();
        let plan = SamplePlan::new(3, 60, 31, 0.8);

        let report = classify(&ZeroProfile, &plan, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Zero);

        // p = r s^2: C5 residual = s^2 + r, clearly nonzero
        let p = ExprProfile::new(|r, s| r * s * s, |_, _| true);
        let report = classify(&p, &plan, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::ScalarOnly);

        // the quadratic family is isotropic with nonvanishing trace
        let quad = ExprProfile::new(|r, s| s * s + (r + 0.25) * s + r - 0.4, |_, _| true);
        let report = classify(&quad, &plan, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::IsotropicNonzero);
        assert!(report.trace_scale_max > 1e-3);
    }

    #[test]
    fn funk_scalar_curvature_is_minus_quarter_f_squared() {
        // the Funk norm is F = 2 |y| p, so R = -F^2/4 reads p^2 - 2 s p_r
        // - p_s = -p^2 in profile terms
        let funk = crate::families::FunkProfile { c_lin: 0.0 };
        for pair in SamplePlan::new(3, 60, 37, 0.85).pairs() {
            let sd = scalar_data(&funk, &pair).unwrap();
            let ic = invariants(&pair).unwrap();
            let p = funk.jet(ic.r, ic.s).unwrap().v;
            let f = 2.0 * pair.y.norm() * p;
            let rel = (sd.r_scalar + 0.25 * f * f).abs() / (1.0 + f * f);
            assert!(
                rel <= 1e-12,
                "R = {} vs -F^2/4 = {}",
                sd.r_scalar,
                -0.25 * f * f
            );
        }
    }
}
