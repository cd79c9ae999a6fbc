//! Closed-form spray families: the zero-curvature profiles, the isotropic
//! (u, v) construction, the Funk and quadratic examples, the two weakly
//! isotropic witnesses, and the space-form spray. Each family exposes an
//! analytic second-order jet, so the residual systems see machine-accurate
//! inputs.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::num::jet::Jet2;
use crate::num::quad::quad;
use crate::num::spline::SplineSurface;
use crate::spray::{Profile, ProjectiveSpray, SphericalSpray, ZeroProfile};

/// Margin kept from blow-up boundaries like r = c.
const DOMAIN_GUARD: f64 = 1e-9;

/// Branch choice for profiles carrying a +/- sqrt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply(&self, j: Jet2) -> Jet2 {
        match self {
            Sign::Plus => j,
            Sign::Minus => -j,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A scalar function of one variable with an analytic or differenced
/// derivative; parameterizes the u and v slots of the isotropic family.
#[derive(Clone)]
pub enum ScalarFn {
    /// coefficients, lowest degree first
    Poly(Vec<f64>),
    /// amplitude * exp(rate * t)
    Exp { amplitude: f64, rate: f64 },
    /// num / sqrt(t + shift), defined for t > -shift
    InvSqrtShift { num: f64, shift: f64 },
    /// amplitude * cos(rate * t)
    Cos { amplitude: f64, rate: f64 },
    /// arbitrary closure; derivative is centrally differenced when absent
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        df: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    },
}

impl ScalarFn {
    pub fn zero() -> Self {
        ScalarFn::Poly(vec![])
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarFn::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci),
            ScalarFn::Exp { amplitude, rate } => amplitude * (rate * t).exp(),
            ScalarFn::InvSqrtShift { num, shift } => num / (t + shift).sqrt(),
            ScalarFn::Cos { amplitude, rate } => amplitude * (rate * t).cos(),
            ScalarFn::Custom { f, .. } => f(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            ScalarFn::Poly(c) => {
                let mut acc = 0.0;
                for (k, &ck) in c.iter().enumerate().skip(1).rev() {
                    acc = acc * t + k as f64 * ck;
                }
                acc
            }
            ScalarFn::Exp { amplitude, rate } => amplitude * rate * (rate * t).exp(),
            ScalarFn::InvSqrtShift { num, shift } => -0.5 * num / (t + shift).powf(1.5),
            ScalarFn::Cos { amplitude, rate } => -amplitude * rate * (rate * t).sin(),
            ScalarFn::Custom { f, df } => match df {
                Some(df) => df(t),
                None => {
                    let h = f64::EPSILON.cbrt() * t.abs().max(1.0);
                    (f(t + h) - f(t - h)) / (2.0 * h)
                }
            },
        }
    }
}

impl std::fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarFn::Poly(c) => write!(f, "Poly({c:?})"),
            ScalarFn::Exp { amplitude, rate } => write!(f, "Exp({amplitude}, {rate})"),
            ScalarFn::InvSqrtShift { num, shift } => {
                write!(f, "InvSqrtShift({num}, {shift})")
            }
            ScalarFn::Cos { amplitude, rate } => write!(f, "Cos({amplitude}, {rate})"),
            ScalarFn::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// Basepoint of the antiderivative in the isotropic construction.
#[derive(Debug, Clone, Copy)]
pub enum BasePoint {
    /// sqrt(r)/2, mirrored into the sign region of s. Keeps the path away
    /// from sigma = 0; the r-dependence is compensated analytically.
    HalfSqrtR,
    /// a fixed abscissa; must share the sign of every evaluated s
    Fixed(f64),
}

/// The isotropic-curvature family
///
///   p(r, s) = [ int_{s0}^{s} u(r - o^2)/o^2 do + v(r) ] s,
///
/// evaluated with differentiation under the integral:
///
///   p_s  = F + v + u(r - s^2)/s          p_ss = -2 u'(r - s^2)
///   p_r  = s (F_r + v')                  p_rs = F_r + v' + u'(r - s^2)/s
///
/// where F_r integrates u'/o^2 and absorbs the moving-basepoint term when
/// s0 = sqrt(r)/2, so the jet stays consistent with the value function.
/// p_rr is differenced from values; no residual system consumes it.
#[derive(Debug, Clone)]
pub struct IsotropicUvProfile {
    pub u: ScalarFn,
    pub v: ScalarFn,
    pub s0: BasePoint,
    pub quad_tol: f64,
}

impl IsotropicUvProfile {
    pub fn new(u: ScalarFn, v: ScalarFn) -> Self {
        IsotropicUvProfile {
            u,
            v,
            s0: BasePoint::HalfSqrtR,
            quad_tol: 1e-12,
        }
    }

    fn basepoint(&self, r: f64, s: f64) -> Result<f64> {
        let s0 = match self.s0 {
            BasePoint::HalfSqrtR => {
                if r <= 0.0 {
                    return Err(Error::DomainExit(
                        "isotropic family needs r > 0 for the default basepoint".into(),
                    ));
                }
                r.sqrt() / 2.0 * s.signum()
            }
            BasePoint::Fixed(v) => v,
        };
        if s == 0.0 || s0 == 0.0 || s.signum() != s0.signum() {
            return Err(Error::SignCrossing);
        }
        Ok(s0)
    }

    /// F(r, s) = int_{s0}^{s} u(r - o^2)/o^2 do
    fn antiderivative(&self, r: f64, s: f64, s0: f64) -> Result<f64> {
        quad(|o| self.u.eval(r - o * o) / (o * o), s0, s, self.quad_tol)
    }

    /// d/dr of the antiderivative, including the moving-basepoint term.
    fn antiderivative_r(&self, r: f64, s: f64, s0: f64) -> Result<f64> {
        let mut f_r = quad(|o| self.u.deriv(r - o * o) / (o * o), s0, s, self.quad_tol)?;
        if let BasePoint::HalfSqrtR = self.s0 {
            // s0 = sign(s) sqrt(r)/2, so ds0/dr = s0/(2r) and the Leibniz
            // boundary term is -u(3r/4)/(2 r s0).
            f_r -= self.u.eval(0.75 * r) / (2.0 * r * s0);
        }
        Ok(f_r)
    }
}

impl Profile for IsotropicUvProfile {
    fn value(&self, r: f64, s: f64) -> Result<f64> {
        if s == 0.0 {
            // continuous extension across the branch line: the divergent
            // -u(r)/s part of the antiderivative cancels against the s
            // prefactor from either side
            return Ok(-self.u.eval(r));
        }
        let s0 = self.basepoint(r, s)?;
        Ok(s * (self.antiderivative(r, s, s0)? + self.v.eval(r)))
    }

    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        let s0 = self.basepoint(r, s)?;
        let f = self.antiderivative(r, s, s0)?;
        let f_r = self.antiderivative_r(r, s, s0)?;
        let t = r - s * s;
        let u = self.u.eval(t);
        let du = self.u.deriv(t);
        let v = self.v.eval(r);
        let dv = self.v.deriv(r);

        let d_rr = {
            let h = f64::EPSILON.cbrt().cbrt() * r.abs().max(1.0);
            let left = self.value(r - h, s)?;
            let right = self.value(r + h, s)?;
            (right - 2.0 * s * (f + v) + left) / (h * h)
        };

        Ok(Jet2 {
            v: s * (f + v),
            d_r: s * (f_r + dv),
            d_s: f + v + u / s,
            d_rr,
            d_rs: f_r + dv + du / s,
            d_ss: -2.0 * du,
        })
    }

    fn r_in_domain(&self, r: f64) -> bool {
        match self.s0 {
            BasePoint::HalfSqrtR => r > 0.0,
            BasePoint::Fixed(_) => true,
        }
    }

    fn in_domain(&self, r: f64, s: f64) -> bool {
        self.r_in_domain(r) && s != 0.0
    }
}

/// Zero-curvature branch p = (s +/- sqrt(s^2 - r + c)) / (c - r) on the ball
/// r < c.
#[derive(Debug, Clone)]
pub struct ZeroCurvatureProfile {
    pub c: f64,
    pub sign: Sign,
}

impl ZeroCurvatureProfile {
    pub fn new(c: f64, sign: Sign) -> Result<Self> {
        if c <= 0.0 {
            return Err(Error::InvalidParameter(
                "zero-curvature parameter c must be > 0".into(),
            ));
        }
        Ok(ZeroCurvatureProfile { c, sign })
    }
}

impl Profile for ZeroCurvatureProfile {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        if !self.r_in_domain(r) {
            return Err(Error::DomainExit(format!(
                "r = {r} outside the ball r < {}",
                self.c
            )));
        }
        if s * s - r + self.c <= 0.0 {
            return Err(Error::DomainExit(
                "square-root argument s^2 - r + c <= 0".into(),
            ));
        }
        let rj = Jet2::var_r(r);
        let sj = Jet2::var_s(s);
        let root = (sj * sj - rj + self.c).sqrt();
        Ok((sj + self.sign.apply(root)) / (-rj + self.c))
    }

    fn r_in_domain(&self, r: f64) -> bool {
        r < self.c * (1.0 - DOMAIN_GUARD)
    }
}

/// Funk-family profile p = (sqrt(s^2 - r + 1) + s)/(2(1 - r)) + C s on the
/// unit ball.
#[derive(Debug, Clone)]
pub struct FunkProfile {
    pub c_lin: f64,
}

impl Profile for FunkProfile {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        if !self.r_in_domain(r) {
            return Err(Error::DomainExit(format!("r = {r} outside the unit ball")));
        }
        if s * s - r + 1.0 <= 0.0 {
            return Err(Error::DomainExit(
                "square-root argument s^2 - r + 1 <= 0".into(),
            ));
        }
        let rj = Jet2::var_r(r);
        let sj = Jet2::var_s(s);
        let root = (sj * sj - rj + 1.0).sqrt();
        Ok((root + sj) / ((-rj + 1.0) * 2.0) + sj * self.c_lin)
    }

    fn r_in_domain(&self, r: f64) -> bool {
        r < 1.0 - DOMAIN_GUARD
    }
}

/// The quadratic isotropic example p = s^2 + (r + c2) s + r - c1, defined
/// everywhere.
#[derive(Debug, Clone)]
pub struct QuadraticProfile {
    pub c1: f64,
    pub c2: f64,
}

impl Profile for QuadraticProfile {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        let rj = Jet2::var_r(r);
        let sj = Jet2::var_s(s);
        Ok(sj * sj + (rj + self.c2) * sj + rj - self.c1)
    }
}

/// Space-form profile alpha = -mu s / (1 + mu r); the induced spray of the
/// constant-curvature metric.
#[derive(Debug, Clone)]
pub struct SpaceformProfile {
    pub mu: f64,
}

impl Profile for SpaceformProfile {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        if !self.r_in_domain(r) {
            return Err(Error::DomainExit(format!("1 + mu r <= 0 at r = {r}")));
        }
        let rj = Jet2::var_r(r);
        let sj = Jet2::var_s(s);
        Ok(-(sj * self.mu) / (rj * self.mu + 1.0))
    }

    fn r_in_domain(&self, r: f64) -> bool {
        1.0 + self.mu * r > DOMAIN_GUARD
    }
}

/// First weakly isotropic example: p = mu/sqrt(eps - r) + 2s/(eps - r).
#[derive(Debug, Clone)]
pub struct WeakIso1Profile {
    pub mu: f64,
    pub eps: f64,
}

impl Profile for WeakIso1Profile {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        if !self.r_in_domain(r) {
            return Err(Error::DomainExit(format!(
                "r = {r} outside the ball r < {}",
                self.eps
            )));
        }
        let rj = Jet2::var_r(r);
        let sj = Jet2::var_s(s);
        let w = -rj + self.eps;
        Ok(w.powf(-0.5) * self.mu + (sj * 2.0) / w)
    }

    fn r_in_domain(&self, r: f64) -> bool {
        r < self.eps * (1.0 - DOMAIN_GUARD)
    }
}

/// Second weakly isotropic example:
/// p = 2 b sqrt(1 + c (r - s^2)) / (c (1 + c r)^{3/4}).
#[derive(Debug, Clone)]
pub struct WeakIso2Profile {
    pub b: f64,
    pub c: f64,
}

impl WeakIso2Profile {
    pub fn new(b: f64, c: f64) -> Result<Self> {
        if c == 0.0 {
            return Err(Error::InvalidParameter("weakiso2 needs c != 0".into()));
        }
        Ok(WeakIso2Profile { b, c })
    }
}

impl Profile for WeakIso2Profile {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        if !self.in_domain(r, s) {
            return Err(Error::DomainExit(format!(
                "weakiso2 domain excludes (r={r}, s={s})"
            )));
        }
        let rj = Jet2::var_r(r);
        let sj = Jet2::var_s(s);
        let num = ((rj - sj * sj) * self.c + 1.0).sqrt();
        let den = (rj * self.c + 1.0).powf(0.75);
        Ok(num / den * (2.0 * self.b / self.c))
    }

    fn r_in_domain(&self, r: f64) -> bool {
        1.0 + self.c * r > DOMAIN_GUARD
    }

    fn in_domain(&self, r: f64, s: f64) -> bool {
        self.r_in_domain(r) && 1.0 + self.c * (r - s * s) > DOMAIN_GUARD
    }
}

/// The gamma profile of the second example: sqrt(1 + c(r - s^2))/(1 + c r);
/// |y| * gamma reproduces the constant-curvature norm alpha_c.
#[derive(Debug, Clone)]
pub struct WeakIso2Gamma {
    pub c: f64,
}

impl Profile for WeakIso2Gamma {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        if 1.0 + self.c * r <= DOMAIN_GUARD || 1.0 + self.c * (r - s * s) <= DOMAIN_GUARD {
            return Err(Error::DomainExit(format!(
                "gamma domain excludes (r={r}, s={s})"
            )));
        }
        let rj = Jet2::var_r(r);
        let sj = Jet2::var_s(s);
        Ok(((rj - sj * sj) * self.c + 1.0).sqrt() / (rj * self.c + 1.0))
    }

    fn r_in_domain(&self, r: f64) -> bool {
        1.0 + self.c * r > DOMAIN_GUARD
    }
}

/// Profile interpolated from a tabulated (r, s) grid by C^2 tensor splines.
pub struct TabulatedProfile {
    surface: SplineSurface,
}

impl TabulatedProfile {
    pub fn new(r_grid: &[f64], s_grid: &[f64], values: &[Vec<f64>]) -> Result<Self> {
        Ok(TabulatedProfile {
            surface: SplineSurface::new(r_grid, s_grid, values)?,
        })
    }
}

impl Profile for TabulatedProfile {
    fn jet(&self, r: f64, s: f64) -> Result<Jet2> {
        if !self.in_domain(r, s) {
            return Err(Error::DomainExit(format!(
                "tabulated grid does not cover (r={r}, s={s})"
            )));
        }
        let (v, d_r, d_s, d_rr, d_rs, d_ss) = self.surface.jet(r, s)?;
        Ok(Jet2 {
            v,
            d_r,
            d_s,
            d_rr,
            d_rs,
            d_ss,
        })
    }

    fn r_in_domain(&self, r: f64) -> bool {
        let (lo, hi) = self.surface.r_range();
        r >= lo && r <= hi
    }

    fn in_domain(&self, r: f64, s: f64) -> bool {
        let (lo, hi) = self.surface.s_range();
        self.r_in_domain(r) && s >= lo && s <= hi
    }
}

/// A weakly-isotropic witness: the 1-homogeneous factor Gamma = |y| gamma
/// and the 1-form coefficient theta = a(r) <x, y>.
#[derive(Clone)]
pub struct WeakIsoWitness {
    pub gamma: Arc<dyn Profile>,
    pub a: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

/// p = mu/sqrt(eps - r) + 2s/(eps - r) with witness Gamma = |y|,
/// a(r) = mu/(eps - r)^{3/2}.
pub fn weakiso_example1(mu: f64, eps: f64) -> Result<(Arc<dyn Profile>, WeakIsoWitness)> {
    if mu <= 0.0 || eps <= 0.0 {
        return Err(Error::InvalidParameter(
            "weakiso1 needs mu > 0 and eps > 0".into(),
        ));
    }
    let profile: Arc<dyn Profile> = Arc::new(WeakIso1Profile { mu, eps });
    let witness = WeakIsoWitness {
        gamma: Arc::new(ExprGamma::one()),
        a: Arc::new(move |r: f64| mu / (eps - r).powf(1.5)),
    };
    Ok((profile, witness))
}

/// The second example with witness gamma = sqrt(1 + c(r - s^2))/(1 + cr),
/// a(r) = b/(1 + cr)^{3/4}.
pub fn weakiso_example2(b: f64, c: f64) -> Result<(Arc<dyn Profile>, WeakIsoWitness)> {
    let profile: Arc<dyn Profile> = Arc::new(WeakIso2Profile::new(b, c)?);
    let witness = WeakIsoWitness {
        gamma: Arc::new(WeakIso2Gamma { c }),
        a: Arc::new(move |r: f64| b / (1.0 + c * r).powf(0.75)),
    };
    Ok((profile, witness))
}

/// Constant-gamma helper (Gamma = |y|).
#[derive(Debug, Clone)]
struct ExprGamma;

impl ExprGamma {
    fn one() -> Self {
        ExprGamma
    }
}

impl Profile for ExprGamma {
    fn jet(&self, _r: f64, _s: f64) -> Result<Jet2> {
        Ok(Jet2::constant(1.0))
    }
}

/// Space-form spray G^i = -(mu <x,y>/(1 + mu |x|^2)) y^i as an
/// (alpha, beta) pair with beta = 0.
pub fn spaceform_spray(mu: f64, dim: usize) -> SphericalSpray {
    SphericalSpray::new(
        dim,
        Arc::new(SpaceformProfile { mu }),
        Arc::new(ZeroProfile),
    )
}

/// Verify Remark-style equivalence of the closed zero-curvature branch with
/// the isotropic construction: with u(t) = -sign/sqrt(c - t) the difference
/// p_closed - s (F + v~) must be independent of s once v~ is fitted at the
/// basepoint. Returns the max |difference| over the s-range.
pub fn remark4_equivalence(
    zc: &ZeroCurvatureProfile,
    r: f64,
    s_range: &[f64],
    flip_sign: bool,
) -> Result<f64> {
    if s_range.is_empty() {
        return Ok(0.0);
    }
    if s_range.iter().any(|&s| s <= 0.0 || s * s > r) {
        return Err(Error::InvalidParameter(
            "s-range must satisfy 0 < s <= sqrt(r)".into(),
        ));
    }
    let mut sign = match zc.sign {
        Sign::Plus => -1.0,
        Sign::Minus => 1.0,
    };
    if flip_sign {
        sign = -sign;
    }
    let c = zc.c;
    let u = move |t: f64| sign / (c - t).sqrt();

    let s0 = r.sqrt() / 2.0;
    let f = |s: f64| quad(|o| u(r - o * o) / (o * o), s0, s, 1e-12);

    // the v(r) freedom is fixed at the basepoint, where F vanishes
    let v_fit = zc.jet(r, s0)?.v / s0;

    let mut worst = 0.0f64;
    for &s in s_range {
        let candidate = s * (f(s)? + v_fit);
        let closed = zc.jet(r, s)?.v;
        worst = worst.max((closed - candidate).abs());
    }
    Ok(worst)
}

/// Catalog entry: a named, parameterized family ready to evaluate.
#[derive(Clone)]
pub struct Family {
    pub name: &'static str,
    pub profile: Arc<dyn Profile>,
    pub witness: Option<WeakIsoWitness>,
    /// radius of the spatial ball the family lives on (infinite if global)
    pub spatial_radius: f64,
}

impl Family {
    pub fn spray(&self, dim: usize) -> ProjectiveSpray {
        ProjectiveSpray::new(dim, self.profile.clone()).with_x_scale(self.spatial_radius.min(1.0))
    }

    /// Radius for drawing sample base points: 90% of the domain ball, capped
    /// at 1 for families defined on all of R^n.
    pub fn sampling_radius(&self) -> f64 {
        if self.spatial_radius.is_finite() {
            0.9 * self.spatial_radius
        } else {
            1.0
        }
    }
}

/// Typed family constructor arguments; the CLI maps its JSON params onto
/// these.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Flat,
    Spaceform {
        mu: f64,
    },
    IsotropicUv {
        u: ScalarFn,
        v: ScalarFn,
    },
    ZeroCurvature {
        c: f64,
        sign: Sign,
    },
    QuadraticExample {
        c1: f64,
        c2: f64,
    },
    Funk {
        c: f64,
    },
    WeakIso1 {
        mu: f64,
        eps: f64,
    },
    WeakIso2 {
        b: f64,
        c: f64,
    },
    CustomTabulated {
        r_grid: Vec<f64>,
        s_grid: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

pub const FAMILY_NAMES: &[&str] = &[
    "flat",
    "spaceform",
    "isotropic_uv",
    "zero_curvature",
    "quadratic_example",
    "funk",
    "weakiso1",
    "weakiso2",
    "custom_tabulated",
];

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Flat => "flat",
            FamilySpec::Spaceform { .. } => "spaceform",
            FamilySpec::IsotropicUv { .. } => "isotropic_uv",
            FamilySpec::ZeroCurvature { .. } => "zero_curvature",
            FamilySpec::QuadraticExample { .. } => "quadratic_example",
            FamilySpec::Funk { .. } => "funk",
            FamilySpec::WeakIso1 { .. } => "weakiso1",
            FamilySpec::WeakIso2 { .. } => "weakiso2",
            FamilySpec::CustomTabulated { .. } => "custom_tabulated",
        }
    }

    pub fn build(&self) -> Result<Family> {
        let name = self.name();
        match self {
            FamilySpec::Flat => Ok(Family {
                name,
                profile: Arc::new(ZeroProfile),
                witness: None,
                spatial_radius: f64::INFINITY,
            }),
            FamilySpec::Spaceform { mu } => Ok(Family {
                name,
                profile: Arc::new(SpaceformProfile { mu: *mu }),
                witness: None,
                spatial_radius: if *mu < 0.0 {
                    (-1.0 / mu).sqrt()
                } else {
                    f64::INFINITY
                },
            }),
            FamilySpec::IsotropicUv { u, v } => Ok(Family {
                name,
                profile: Arc::new(IsotropicUvProfile::new(u.clone(), v.clone())),
                witness: None,
                spatial_radius: f64::INFINITY,
            }),
            FamilySpec::ZeroCurvature { c, sign } => {
                let profile = ZeroCurvatureProfile::new(*c, *sign)?;
                Ok(Family {
                    name,
                    profile: Arc::new(profile),
                    witness: None,
                    spatial_radius: c.sqrt(),
                })
            }
            FamilySpec::QuadraticExample { c1, c2 } => Ok(Family {
                name,
                profile: Arc::new(QuadraticProfile { c1: *c1, c2: *c2 }),
                witness: None,
                spatial_radius: f64::INFINITY,
            }),
            FamilySpec::Funk { c } => Ok(Family {
                name,
                profile: Arc::new(FunkProfile { c_lin: *c }),
                witness: None,
                spatial_radius: 1.0,
            }),
            FamilySpec::WeakIso1 { mu, eps } => {
                let (profile, witness) = weakiso_example1(*mu, *eps)?;
                Ok(Family {
                    name,
                    profile,
                    witness: Some(witness),
                    spatial_radius: eps.sqrt(),
                })
            }
            FamilySpec::WeakIso2 { b, c } => {
                let (profile, witness) = weakiso_example2(*b, *c)?;
                Ok(Family {
                    name,
                    profile,
                    witness: Some(witness),
                    spatial_radius: if *c < 0.0 {
                        (-1.0 / c).sqrt()
                    } else {
                        f64::INFINITY
                    },
                })
            }
            FamilySpec::CustomTabulated {
                r_grid,
                s_grid,
                values,
            } => {
                let profile = TabulatedProfile::new(r_grid, s_grid, values)?;
                let radius = r_grid.last().copied().unwrap_or(1.0).max(0.0).sqrt();
                Ok(Family {
                    name,
                    profile: Arc::new(profile),
                    witness: None,
                    spatial_radius: radius,
                })
            }
        }
    }
}
