//! Finsler metrics and the quantities hung off them: fundamental tensor,
//! induced spray, flag curvature, and the metrizability scalar check.
//!
//! The built-in metrics carry analytic norms F; every derivative of F^2 goes
//! through the shared differencing engine. That keeps this module an
//! independent oracle for the closed-form spray families: the induced sprays
//! here are computed from F alone and then compared against the profiles, so
//! an error in one route cannot hide in the other.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::curvature::{riemann_generic, FdSprayEngine};
use crate::error::{Error, Result};
use crate::num::fd::Field;
use crate::num::invariants::{PointPair, ToleranceConfig};
use crate::spray::Spray;

/// A Finsler norm on (a domain of) R^n: 1-homogeneous in y, smooth away
/// from y = 0, with positive-definite fundamental tensor on its domain.
pub trait Metric: Send + Sync {
    fn dim(&self) -> usize;
    fn in_domain(&self, x: &DVector<f64>) -> bool;
    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64>;

    /// Radius of the domain ball (infinite when global); differencing
    /// engines shrink x-stencils proportionally on small balls.
    fn domain_radius(&self) -> f64 {
        f64::INFINITY
    }
}

/// Euclidean (locally Minkowski) norm F = |y|.
pub struct Minkowski {
    pub dim: usize,
}

impl Metric for Minkowski {
    fn dim(&self) -> usize {
        self.dim
    }

    fn in_domain(&self, _x: &DVector<f64>) -> bool {
        true
    }

    fn value(&self, _x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        Ok(y.norm())
    }
}

/// Constant-sectional-curvature norm
/// alpha_mu = sqrt(|y|^2 + mu(|x|^2 |y|^2 - <x,y>^2)) / (1 + mu |x|^2).
pub struct SpaceformAlpha {
    pub dim: usize,
    pub mu: f64,
}

impl Metric for SpaceformAlpha {
    fn dim(&self) -> usize {
        self.dim
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        1.0 + self.mu * x.norm_squared() > 1e-9
    }

    fn domain_radius(&self) -> f64 {
        if self.mu < 0.0 {
            (-1.0 / self.mu).sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let r = x.norm_squared();
        let denom = 1.0 + self.mu * r;
        if denom <= 1e-9 {
            return Err(Error::DomainExit(format!(
                "1 + mu |x|^2 <= 0 at |x|^2 = {r}"
            )));
        }
        let xy = x.dot(y);
        let arg = y.norm_squared() + self.mu * (r * y.norm_squared() - xy * xy);
        if arg < 0.0 {
            return Err(Error::DomainExit("norm argument went negative".into()));
        }
        Ok(arg.sqrt() / denom)
    }
}

/// Funk norm on the unit ball:
/// F = (sqrt(<x,y>^2 + |y|^2 (1 - |x|^2)) + <x,y>) / (1 - |x|^2).
pub struct FunkMetric {
    pub dim: usize,
}

impl Metric for FunkMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        x.norm_squared() < 1.0 - 1e-9
    }

    fn domain_radius(&self) -> f64 {
        1.0
    }

    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let r = x.norm_squared();
        if r >= 1.0 - 1e-9 {
            return Err(Error::DomainExit(format!(
                "|x|^2 = {r} outside the unit ball"
            )));
        }
        let xy = x.dot(y);
        let ny2 = y.norm_squared();
        let root = (xy * xy + ny2 * (1.0 - r)).sqrt();
        if xy >= 0.0 {
            Ok((root + xy) / (1.0 - r))
        } else {
            // rationalized: root + xy = |y|^2 (1 - r) / (root - xy), which
            // avoids the cancellation when xy is large and negative
            Ok(ny2 / (root - xy))
        }
    }
}

/// Berwald-type norm on the ball |x|^2 < c, either branch:
///
///   F = (sqrt((c - |x|^2)|y|^2 + <x,y>^2) +/- <x,y>)^2
///       / ((c - |x|^2)^2 sqrt((c - |x|^2)|y|^2 + <x,y>^2))
///
/// The minus branch is the reverse metric of the plus branch. Its induced
/// spray is projectively flat with zero curvature.
pub struct BerwaldMetric {
    pub dim: usize,
    pub c: f64,
    pub plus: bool,
}

impl Metric for BerwaldMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        x.norm_squared() < self.c * (1.0 - 1e-9)
    }

    fn domain_radius(&self) -> f64 {
        self.c.sqrt()
    }

    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let r = x.norm_squared();
        let w = self.c - r;
        if w <= 1e-9 * self.c {
            return Err(Error::DomainExit(format!(
                "|x|^2 = {r} outside the ball of radius sqrt({})",
                self.c
            )));
        }
        let xy = x.dot(y);
        let ny2 = y.norm_squared();
        let root = (w * ny2 + xy * xy).sqrt();
        let signed = if self.plus { xy } else { -xy };
        if signed >= 0.0 {
            Ok((root + signed).powi(2) / (w * w * root))
        } else {
            // (root + signed)^2 = w^2 |y|^4 / (root - signed)^2 without the
            // cancellation of root against -signed
            Ok(ny2 * ny2 / ((root - signed).powi(2) * root))
        }
    }
}

/// g_ij = [F^2]_{y^i y^j} / 2 with its inverse; positive-definiteness is
/// reported, not enforced.
pub struct FundamentalTensor {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub positive_definite: bool,
}

fn f_squared_field<'a>(metric: &'a dyn Metric, n: usize) -> impl Fn(&[f64]) -> f64 + 'a {
    move |z: &[f64]| {
        let x = DVector::from_row_slice(&z[..n]);
        let y = DVector::from_row_slice(&z[n..]);
        match metric.value(&x, &y) {
            Ok(f) => f * f,
            Err(_) => f64::NAN,
        }
    }
}

fn pack(pair: &PointPair) -> Vec<f64> {
    let mut z = Vec::with_capacity(2 * pair.dim());
    z.extend(pair.x.iter());
    z.extend(pair.y.iter());
    z
}

// x-steps scale with max(x_scale, |x_k|), where x_scale shrinks with the
// metric's domain ball; y-steps with |y| (F^2 is 2-homogeneous in y, so
// the relative step is what controls the truncation).
fn pair_scales(metric: &dyn Metric, pair: &PointPair) -> Vec<f64> {
    let x_scale = metric.domain_radius().clamp(0.05, 1.0);
    let ny = pair.y.norm();
    let mut scales: Vec<f64> = pair.x.iter().map(|v| v.abs().max(x_scale)).collect();
    scales.extend(std::iter::repeat_n(ny, pair.dim()));
    scales
}

pub fn fundamental_tensor(
    metric: &dyn Metric,
    pair: &PointPair,
    cfg: &ToleranceConfig,
) -> Result<FundamentalTensor> {
    let n = pair.dim();
    let f2 = f_squared_field(metric, n);
    let field = Field::with_scales(&f2, cfg, pair_scales(metric, pair));
    let z = pack(pair);

    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * field.d2(&z, n + i, n + j);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::EngineFailure(
            "fundamental-tensor stencil left the metric domain".into(),
        ));
    }

    let positive_definite = g
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .all(|&ev| ev > 0.0);

    let g_inv = g.clone().try_inverse().ok_or(Error::SingularTensor)?;
    Ok(FundamentalTensor {
        g,
        g_inv,
        positive_definite,
    })
}

/// Induced geodesic coefficients
/// G^i = g^{ij} ( [F^2]_{y^j x^k} y^k - [F^2]_{x^j} ) / 4.
pub fn induced_spray(
    metric: &dyn Metric,
    pair: &PointPair,
    cfg: &ToleranceConfig,
) -> Result<DVector<f64>> {
    let n = pair.dim();
    let tensor = fundamental_tensor(metric, pair, cfg)?;
    let f2 = f_squared_field(metric, n);
    let field = Field::with_scales(&f2, cfg, pair_scales(metric, pair));
    let z = pack(pair);

    let mut rhs = DVector::zeros(n);
    for j in 0..n {
        let mut v = -field.d1(&z, j); // -[F^2]_{x^j}
        for k in 0..n {
            v += field.d2(&z, n + j, k) * pair.y[k];
        }
        rhs[j] = v;
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::EngineFailure(
            "induced-spray stencil left the metric domain".into(),
        ));
    }
    Ok(0.25 * tensor.g_inv * rhs)
}

/// The spray canonically attached to a metric; evaluation goes through the
/// differencing engine at each call.
pub struct InducedSpray {
    pub metric: Arc<dyn Metric>,
    pub cfg: ToleranceConfig,
}

impl InducedSpray {
    /// The default configuration is the coarse nested one: an induced spray
    /// is already one differencing deep, and the usual consumers (curvature
    /// engines, metrizability sweeps) difference it again. Callers that
    /// only evaluate coefficients can tighten `cfg` themselves.
    pub fn new(metric: Arc<dyn Metric>) -> Self {
        InducedSpray {
            metric,
            cfg: nested_cfg(&ToleranceConfig::default()),
        }
    }
}

impl Spray for InducedSpray {
    fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.metric.in_domain(x)
    }

    fn coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        let pair = PointPair::new(x.clone(), y.clone())?;
        induced_spray(self.metric.as_ref(), &pair, &self.cfg)
    }

    fn x_scale(&self) -> f64 {
        self.metric.domain_radius().clamp(0.05, 1.0)
    }
}

// Differencing an induced spray differences F^2 twice over. The inner
// stencil's rounding noise is amplified by the outer stencil's 1/h^2, so
// doubly-nested evaluations coarsen the second-derivative step to the
// measured error optimum for the built-in metrics.
fn nested_cfg(cfg: &ToleranceConfig) -> ToleranceConfig {
    ToleranceConfig {
        second_step_factor: 0.25,
        ..*cfg
    }
}

/// Flag curvature of the plane spanned by (y, u) with flagpole y:
///
///   K = g_y(u, R_y u) / (g_y(y,y) g_y(u,u) - g_y(y,u)^2),
///
/// with R_y the curvature of the metric's induced spray.
///
/// The value is invariant under u -> u + t y and u -> c u; u is projected
/// g-orthogonally onto the flag before evaluation so the computed value
/// inherits that invariance exactly instead of up to curvature noise.
pub fn flag_curvature(
    metric: &dyn Metric,
    pair: &PointPair,
    u: &DVector<f64>,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if u.len() != pair.dim() {
        return Err(Error::DimensionMismatch(
            "flag vector has wrong length".into(),
        ));
    }
    let cfg = nested_cfg(cfg);
    let tensor = fundamental_tensor(metric, pair, &cfg)?;
    let g = &tensor.g;

    let gyy = (g * &pair.y).dot(&pair.y);
    let gyu = (g * &pair.y).dot(u);
    let projected = u - gyu / gyy * &pair.y;
    if projected.norm() < 1e-9 * u.norm() {
        return Err(Error::DegenerateFlag);
    }
    let u = &projected / projected.norm(); // scale-free by invariance

    let guu = (g * &u).dot(&u);
    let denom = gyy * guu;
    if !denom.is_finite() || denom.abs() < 1e-12 * gyy.abs() {
        return Err(Error::DegenerateFlag);
    }

    let spray = BorrowedInducedSpray { metric, cfg };
    let engine = FdSprayEngine { spray: &spray, cfg };
    let r = riemann_generic(&engine, pair)?;
    let ru = &r.matrix * &u;
    Ok((g * &u).dot(&ru) / denom)
}

/// Induced spray over a borrowed metric; avoids cloning into an Arc when the
/// spray only lives for one curvature evaluation.
struct BorrowedInducedSpray<'a> {
    metric: &'a dyn Metric,
    cfg: ToleranceConfig,
}

impl Spray for BorrowedInducedSpray<'_> {
    fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.metric.in_domain(x)
    }

    fn coeffs(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        let pair = PointPair::new(x.clone(), y.clone())?;
        induced_spray(self.metric, &pair, &self.cfg)
    }

    fn x_scale(&self) -> f64 {
        self.metric.domain_radius().clamp(0.05, 1.0)
    }
}

/// How close R^m_m / ((n-1) F^2) is to a constant over the samples.
#[derive(Debug, Clone)]
pub struct MetrizabilityReport {
    /// fitted constant (mean of the per-sample ratios)
    pub lambda: f64,
    /// max |k - lambda| over the samples
    pub constancy_residual: f64,
    pub samples: usize,
}

/// Evaluate k(x, y) = R^m_m / ((n-1) F^2) for the given spray against the
/// given metric; for a metric-induced spray of constant flag curvature the
/// ratio is that constant.
pub fn metrizability_scalar_check(
    spray: &dyn Spray,
    metric: &dyn Metric,
    pairs: &[PointPair],
    cfg: &ToleranceConfig,
) -> Result<MetrizabilityReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    // the spray is typically metric-induced, i.e. already differenced once
    let cfg = nested_cfg(cfg);
    let engine = FdSprayEngine { spray, cfg };
    let mut ks = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let nm1 = (pair.dim() - 1) as f64;
        let r = riemann_generic(&engine, pair)?;
        let f = metric.value(&pair.x, &pair.y)?;
        ks.push(r.matrix.trace() / (nm1 * f * f));
    }
    let lambda = ks.iter().sum::<f64>() / ks.len() as f64;
    let constancy_residual = ks.iter().fold(0.0f64, |acc, k| acc.max((k - lambda).abs()));
    Ok(MetrizabilityReport {
        lambda,
        constancy_residual,
        samples: ks.len(),
    })
}

/// Named metric constructors for the CLI catalog.
#[derive(Debug, Clone)]
pub enum MetricSpec {
    Minkowski,
    SpaceformAlpha { mu: f64 },
    Funk,
    Berwald { c: f64, plus: bool },
}

pub const METRIC_NAMES: &[&str] = &["minkowski", "spaceform_alpha", "funk", "berwald"];

impl MetricSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MetricSpec::Minkowski => "minkowski",
            MetricSpec::SpaceformAlpha { .. } => "spaceform_alpha",
            MetricSpec::Funk => "funk",
            MetricSpec::Berwald { .. } => "berwald",
        }
    }

    pub fn build(&self, dim: usize) -> Result<Arc<dyn Metric>> {
        match self {
            MetricSpec::Minkowski => Ok(Arc::new(Minkowski { dim })),
            MetricSpec::SpaceformAlpha { mu } => Ok(Arc::new(SpaceformAlpha { dim, mu: *mu })),
            MetricSpec::Funk => Ok(Arc::new(FunkMetric { dim })),
            MetricSpec::Berwald { c, plus } => {
                if *c <= 0.0 {
                    return Err(Error::InvalidParameter("berwald needs c > 0".into()));
                }
                Ok(Arc::new(BerwaldMetric {
                    dim,
                    c: *c,
                    plus: *plus,
                }))
            }
        }
    }

    /// Radius of the metric's domain ball (infinite when global).
    pub fn domain_radius(&self) -> f64 {
        match self {
            MetricSpec::Minkowski => f64::INFINITY,
            MetricSpec::SpaceformAlpha { mu } => {
                if *mu < 0.0 {
                    (-1.0 / mu).sqrt()
                } else {
                    f64::INFINITY
                }
            }
            MetricSpec::Funk => 1.0,
            MetricSpec::Berwald { c, .. } => c.sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{spaceform_spray, Sign, ZeroCurvatureProfile};
    use crate::sample::SamplePlan;
    use crate::spray::eval_projective;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn minkowski_tensor_is_identity() {
        let m = Minkowski { dim: 3 };
        let pair = PointPair::from_slices(&[0.2, -0.4, 0.1], &[0.9, 0.3, -0.7]).unwrap();
        let t = fundamental_tensor(&m, &pair, &cfg()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((t.g[(i, j)] - want).abs() < 1e-8);
            }
        }
        assert!(t.positive_definite);
        let g = induced_spray(&m, &pair, &cfg()).unwrap();
        assert!(g.norm() < 1e-9);
    }

    #[test]
    fn spaceform_alpha_mu_zero_is_euclidean() {
        let m = SpaceformAlpha { dim: 2, mu: 0.0 };
        let pair = PointPair::from_slices(&[0.3, 0.1], &[1.2, -0.4]).unwrap();
        let t = fundamental_tensor(&m, &pair, &cfg()).unwrap();
        assert!((t.g[(0, 0)] - 1.0).abs() < 1e-8);
        assert!((t.g[(1, 1)] - 1.0).abs() < 1e-8);
        assert!(t.g[(0, 1)].abs() < 1e-8);
    }

    #[test]
    fn tensor_inverse_is_consistent() {
        let m = BerwaldMetric {
            dim: 3,
            c: 1.0,
            plus: true,
        };
        for pair in SamplePlan::new(3, 20, 97, 0.75).pairs() {
            let t = fundamental_tensor(&m, &pair, &cfg()).unwrap();
            let defect = &t.g * &t.g_inv - nalgebra::DMatrix::identity(3, 3);
            assert!(defect.amax() <= 1e-8, "g g^-1 defect {}", defect.amax());
        }
    }

    #[test]
    fn weakiso2_gamma_reproduces_constant_curvature_norm() {
        // |y| gamma(r, s) and alpha_c are two spellings of the same norm
        let c = 1.0;
        let (_, witness) = crate::families::weakiso_example2(1.0, c).unwrap();
        let alpha = SpaceformAlpha { dim: 3, mu: c };
        for pair in SamplePlan::new(3, 100, 101, 0.9).pairs() {
            let ic = crate::num::invariants(&pair).unwrap();
            let via_profile = pair.y.norm() * witness.gamma.jet(ic.r, ic.s).unwrap().v;
            let via_norm = alpha.value(&pair.x, &pair.y).unwrap();
            assert!(
                (via_profile - via_norm).abs() <= 1e-12 * (1.0 + via_norm),
                "{via_profile} vs {via_norm}"
            );
        }
    }

    #[test]
    fn funk_tensor_positive_definite_at_many_directions() {
        let m = FunkMetric { dim: 3 };
        let mut plan = SamplePlan::new(3, 50, 41, 0.0);
        plan.radius = 0.0; // x = 0, directions vary
        for pair in plan.pairs() {
            let t = fundamental_tensor(&m, &pair, &cfg()).unwrap();
            assert!(
                t.positive_definite,
                "not positive definite at y = {:?}",
                pair.y
            );
        }
    }

    #[test]
    fn euler_identity_for_builtin_metrics() {
        // g_ij y^i y^j = F^2 for 1-homogeneous F
        let metrics: Vec<(Box<dyn Metric>, f64)> = vec![
            (Box::new(Minkowski { dim: 3 }), 2.0),
            (Box::new(SpaceformAlpha { dim: 3, mu: 1.0 }), 2.0),
            (Box::new(FunkMetric { dim: 3 }), 0.85),
            (
                Box::new(BerwaldMetric {
                    dim: 3,
                    c: 1.0,
                    plus: true,
                }),
                0.85,
            ),
        ];
        for (m, radius) in &metrics {
            for pair in SamplePlan::new(3, 40, 43, radius * 0.9).pairs() {
                let t = fundamental_tensor(m.as_ref(), &pair, &cfg()).unwrap();
                let f = m.value(&pair.x, &pair.y).unwrap();
                let quad_form = (&t.g * &pair.y).dot(&pair.y);
                let rel = (quad_form - f * f).abs() / (1.0 + f * f);
                assert!(rel <= 1e-8, "Euler defect {rel}");
            }
        }
    }

    #[test]
    fn induced_spray_matches_spaceform_profile() {
        for mu in [-0.5, 1.0] {
            let m = SpaceformAlpha { dim: 3, mu };
            let spray = spaceform_spray(mu, 3);
            for pair in SamplePlan::new(3, 30, 47, 0.8).pairs() {
                let g_metric = induced_spray(&m, &pair, &cfg()).unwrap();
                let g_profile = spray.coeffs(&pair.x, &pair.y).unwrap();
                let rel = (&g_metric - &g_profile).norm() / (1.0 + g_profile.norm());
                assert!(rel <= 1e-6, "mu={mu}: {rel}");
            }
        }
    }

    #[test]
    fn berwald_induced_spray_matches_zero_curvature_profile() {
        for (plus, sign) in [(true, Sign::Plus), (false, Sign::Minus)] {
            let m = BerwaldMetric {
                dim: 3,
                c: 1.0,
                plus,
            };
            let p = ZeroCurvatureProfile::new(1.0, sign).unwrap();
            for pair in SamplePlan::new(3, 25, 53, 0.8).pairs() {
                let g_metric = induced_spray(&m, &pair, &cfg()).unwrap();
                let g_profile = eval_projective(&p, &pair).unwrap();
                let rel = (&g_metric - &g_profile).norm() / (1.0 + g_profile.norm());
                assert!(rel <= 1e-6, "plus={plus}: {rel}");
            }
        }
    }

    #[test]
    fn induced_spray_two_homogeneous() {
        let m = FunkMetric { dim: 3 };
        for pair in SamplePlan::new(3, 20, 59, 0.8).pairs() {
            let g1 = induced_spray(&m, &pair, &cfg()).unwrap();
            let scaled = PointPair::new(pair.x.clone(), 2.0 * &pair.y).unwrap();
            let g2 = induced_spray(&m, &scaled, &cfg()).unwrap();
            let rel = (&g2 - 4.0 * &g1).norm() / (1.0 + 4.0 * g1.norm());
            assert!(rel <= 1e-8, "homogeneity defect {rel}");
        }
    }

    fn orthogonal_flag(pair: &PointPair, seed: u64) -> DVector<f64> {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        loop {
            let u: DVector<f64> = DVector::from_fn(pair.dim(), |_, _| -> f64 {
                StandardNormal.sample(&mut rng)
            });
            let proj = &u - u.dot(&pair.y) / pair.y.norm_squared() * &pair.y;
            if proj.norm() > 1e-3 {
                return proj;
            }
        }
    }

    #[test]
    fn flag_curvature_of_flat_metric_is_zero() {
        let m = Minkowski { dim: 3 };
        let pair = PointPair::from_slices(&[0.1, 0.2, -0.3], &[1.0, -0.5, 0.4]).unwrap();
        let u = orthogonal_flag(&pair, 1);
        let k = flag_curvature(&m, &pair, &u, &cfg()).unwrap();
        assert!(k.abs() < 1e-8, "K = {k}");
    }

    #[test]
    fn flag_curvature_constant_curvature_metric() {
        let m = SpaceformAlpha { dim: 3, mu: 1.0 };
        for (i, pair) in SamplePlan::new(3, 8, 61, 0.7)
            .pairs()
            .into_iter()
            .enumerate()
        {
            let u = orthogonal_flag(&pair, 100 + i as u64);
            let k = flag_curvature(&m, &pair, &u, &cfg()).unwrap();
            assert!((k - 1.0).abs() <= 1e-5, "K = {k}");
        }
    }

    #[test]
    fn flag_curvature_funk_quarter() {
        let m = FunkMetric { dim: 3 };
        for (i, pair) in SamplePlan::new(3, 8, 67, 0.8)
            .pairs()
            .into_iter()
            .enumerate()
        {
            let u = orthogonal_flag(&pair, 200 + i as u64);
            let k = flag_curvature(&m, &pair, &u, &cfg()).unwrap();
            assert!((k + 0.25).abs() <= 1e-5, "K = {k}");
        }
    }

    #[test]
    fn flag_curvature_invariances() {
        // K is invariant under u -> u + t y and u -> c u
        let m = FunkMetric { dim: 3 };
        let pair = PointPair::from_slices(&[0.3, -0.2, 0.1], &[0.8, 0.4, -0.9]).unwrap();
        let u = orthogonal_flag(&pair, 3);
        let base = flag_curvature(&m, &pair, &u, &cfg()).unwrap();
        for (t, c) in [(0.7, 2.5), (-1.3, 0.4), (2.0, -1.5)] {
            let shifted = &u + t * &pair.y;
            let k1 = flag_curvature(&m, &pair, &shifted, &cfg()).unwrap();
            let k2 = flag_curvature(&m, &pair, &(c * &u), &cfg()).unwrap();
            assert!((k1 - base).abs() / (1.0 + base.abs()) <= 1e-6);
            assert!((k2 - base).abs() / (1.0 + base.abs()) <= 1e-6);
        }
    }

    #[test]
    fn degenerate_flag_rejected() {
        let m = Minkowski { dim: 2 };
        let pair = PointPair::from_slices(&[0.1, 0.0], &[1.0, 0.0]).unwrap();
        let res = flag_curvature(&m, &pair, &(3.0 * &pair.y), &cfg());
        assert!(matches!(res, Err(Error::DegenerateFlag)));
    }

    #[test]
    fn metrizability_flat_and_funk() {
        let cfg = cfg();

        let mink = Minkowski { dim: 3 };
        let flat = crate::spray::ProjectiveSpray::new(3, Arc::new(crate::spray::ZeroProfile));
        let pairs = SamplePlan::new(3, 15, 71, 0.8).pairs();
        let rep = metrizability_scalar_check(&flat, &mink, &pairs, &cfg).unwrap();
        assert!(rep.lambda.abs() < 1e-9);
        assert!(rep.constancy_residual < 1e-9);

        let funk = FunkMetric { dim: 3 };
        let spray = InducedSpray::new(Arc::new(FunkMetric { dim: 3 }));
        let rep = metrizability_scalar_check(&spray, &funk, &pairs, &cfg).unwrap();
        assert!((rep.lambda + 0.25).abs() <= 1e-4, "lambda = {}", rep.lambda);
        assert!(
            rep.constancy_residual <= 1e-5,
            "residual = {}",
            rep.constancy_residual
        );

        // space form: the profile spray against the alpha_mu norm fits mu
        let alpha = SpaceformAlpha { dim: 3, mu: 1.0 };
        let sf = spaceform_spray(1.0, 3);
        let rep = metrizability_scalar_check(&sf, &alpha, &pairs, &cfg).unwrap();
        assert!((rep.lambda - 1.0).abs() <= 1e-4, "lambda = {}", rep.lambda);
        assert!(
            rep.constancy_residual <= 1e-5,
            "residual = {}",
            rep.constancy_residual
        );
    }
}
