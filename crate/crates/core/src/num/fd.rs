//! Richardson-extrapolated central differences.
//!
//! Two layers: `fd_jet2` builds a full second-order jet of a scalar field on
//! (r, s), and the `Field` helpers differentiate scalar fields on R^m (used
//! by the generic curvature engine and the Finsler derivative plumbing).
//! Every quotient is computed at steps h and h/2 and combined as
//! (4 D(h/2) - D(h)) / 3, cancelling the leading h^2 truncation term.

use crate::error::{Error, Result};
use crate::num::invariants::ToleranceConfig;
use crate::num::jet::Jet2;

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Second-order jet of `f` at (r, s) by central differences.
///
/// The stencil is checked against `in_domain` before any evaluation; if a
/// corner falls outside, the call fails with `DomainExit` rather than
/// sampling the field where it is not defined.
pub fn fd_jet2<F, D>(f: F, in_domain: D, r: f64, s: f64, cfg: &ToleranceConfig) -> Result<Jet2>
where
    F: Fn(f64, f64) -> f64,
    D: Fn(f64, f64) -> bool,
{
    let h1r = cfg.step1(r);
    let h1s = cfg.step1(s);
    let h2r = cfg.step2(r);
    let h2s = cfg.step2(s);

    let hr = h1r.max(h2r);
    let hs = h1s.max(h2s);
    for (cr, cs) in [
        (r - hr, s - hs),
        (r - hr, s + hs),
        (r + hr, s - hs),
        (r + hr, s + hs),
        (r - hr, s),
        (r + hr, s),
        (r, s - hs),
        (r, s + hs),
    ] {
        if !in_domain(cr, cs) {
            return Err(Error::DomainExit(format!(
                "fd stencil left the profile domain near (r={cr:.6}, s={cs:.6})"
            )));
        }
    }

    let v = f(r, s);

    let d1 = |h: f64, g: &dyn Fn(f64) -> f64| {
        let coarse = (g(h) - g(-h)) / (2.0 * h);
        let fine = (g(h / 2.0) - g(-h / 2.0)) / h;
        richardson(coarse, fine)
    };
    let d2 = |h: f64, g: &dyn Fn(f64) -> f64| {
        let coarse = (g(h) - 2.0 * v + g(-h)) / (h * h);
        let fine = (g(h / 2.0) - 2.0 * v + g(-h / 2.0)) / (h * h / 4.0);
        richardson(coarse, fine)
    };

    let d_r = d1(h1r, &|e| f(r + e, s));
    let d_s = d1(h1s, &|e| f(r, s + e));
    let d_rr = d2(h2r, &|e| f(r + e, s));
    let d_ss = d2(h2s, &|e| f(r, s + e));

    let cross = |hr: f64, hs: f64| {
        (f(r + hr, s + hs) - f(r + hr, s - hs) - f(r - hr, s + hs) + f(r - hr, s - hs))
            / (4.0 * hr * hs)
    };
    let d_rs = richardson(cross(h2r, h2s), cross(h2r / 2.0, h2s / 2.0));

    let jet = Jet2 {
        v,
        d_r,
        d_s,
        d_rr,
        d_rs,
        d_ss,
    };
    if !jet.is_finite() {
        return Err(Error::EngineFailure(format!(
            "non-finite finite-difference jet at (r={r}, s={s})"
        )));
    }
    Ok(jet)
}

/// Central-difference partials of a scalar field on R^m.
///
/// Steps default to the config scaling against max(1, |z_k|); callers whose
/// fields are homogeneous (spray coefficients, metric norms in y) supply
/// per-coordinate scales instead so the relative step h/scale stays
/// constant when the natural coordinate magnitude falls below 1.
pub struct Field<'a> {
    f: &'a dyn Fn(&[f64]) -> f64,
    cfg: &'a ToleranceConfig,
    scales: Option<Vec<f64>>,
}

impl<'a> Field<'a> {
    pub fn new(f: &'a dyn Fn(&[f64]) -> f64, cfg: &'a ToleranceConfig) -> Self {
        Field {
            f,
            cfg,
            scales: None,
        }
    }

    pub fn with_scales(
        f: &'a dyn Fn(&[f64]) -> f64,
        cfg: &'a ToleranceConfig,
        scales: Vec<f64>,
    ) -> Self {
        Field {
            f,
            cfg,
            scales: Some(scales),
        }
    }

    fn scale(&self, z: &[f64], k: usize) -> f64 {
        match &self.scales {
            Some(s) => s[k],
            None => z[k].abs().max(1.0),
        }
    }

    fn eval_shift(&self, z: &[f64], k: usize, e: f64) -> f64 {
        let mut w = z.to_vec();
        w[k] += e;
        (self.f)(&w)
    }

    fn eval_shift2(&self, z: &[f64], j: usize, ej: f64, k: usize, ek: f64) -> f64 {
        let mut w = z.to_vec();
        w[j] += ej;
        w[k] += ek;
        (self.f)(&w)
    }

    fn h(&self, z: &[f64], k: usize) -> f64 {
        self.cfg.field_step2_for_scale(self.scale(z, k))
    }

    /// df/dz_k, sixth order.
    pub fn d1(&self, z: &[f64], k: usize) -> f64 {
        let h = self.h(z, k);
        let mut acc = 0.0;
        for (off, w) in D1_STENCIL {
            acc += w * self.eval_shift(z, k, off * h);
        }
        acc / h
    }

    /// d2f/dz_j dz_k (j == k allowed), sixth order. Mixed partials compose
    /// two first-derivative stencils, which keeps them symmetric in (j, k)
    /// by construction.
    pub fn d2(&self, z: &[f64], j: usize, k: usize) -> f64 {
        if j == k {
            let h = self.h(z, k);
            let mut acc = D2_CENTER * (self.f)(z);
            for (off, w) in D2_STENCIL {
                acc += w * self.eval_shift(z, k, off * h);
            }
            acc / (h * h)
        } else {
            let hj = self.h(z, j);
            let hk = self.h(z, k);
            let mut acc = 0.0;
            for (oj, wj) in D1_STENCIL {
                for (ok, wk) in D1_STENCIL {
                    acc += wj * wk * self.eval_shift2(z, j, oj * hj, k, ok * hk);
                }
            }
            acc / (hj * hk)
        }
    }
}

// Sixth-order central first derivative over offsets +/-{1,2,3} h.
const D1_STENCIL: [(f64, f64); 6] = [
    (-3.0, -1.0 / 60.0),
    (-2.0, 9.0 / 60.0),
    (-1.0, -45.0 / 60.0),
    (1.0, 45.0 / 60.0),
    (2.0, -9.0 / 60.0),
    (3.0, 1.0 / 60.0),
];

// Sixth-order central second derivative, off-center weights.
const D2_STENCIL: [(f64, f64); 6] = [
    (-3.0, 2.0 / 180.0),
    (-2.0, -27.0 / 180.0),
    (-1.0, 270.0 / 180.0),
    (1.0, 270.0 / 180.0),
    (2.0, -27.0 / 180.0),
    (3.0, 2.0 / 180.0),
];
const D2_CENTER: f64 = -490.0 / 180.0;

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn bilinear_exact() {
        // f(r,s) = r*s at (2,3)
        let j = fd_jet2(|r, s| r * s, |_, _| true, 2.0, 3.0, &cfg()).unwrap();
        assert!((j.d_r - 3.0).abs() < 1e-10);
        assert!((j.d_s - 2.0).abs() < 1e-10);
        assert!((j.d_rs - 1.0).abs() < 1e-10);
        assert!(j.d_rr.abs() < 1e-10);
        assert!(j.d_ss.abs() < 1e-10);
    }

    #[test]
    fn pure_square() {
        // f(r,s) = s^2 at (0,1)
        let j = fd_jet2(|_, s| s * s, |_, _| true, 0.0, 1.0, &cfg()).unwrap();
        assert!((j.d_ss - 2.0).abs() < 1e-10);
        assert!((j.d_s - 2.0).abs() < 1e-10);
        assert!(j.d_r.abs() < 1e-10);
        assert!(j.d_rr.abs() < 1e-10);
        assert!(j.d_rs.abs() < 1e-10);
    }

    #[test]
    fn exp_profile_matches_analytic_jet() {
        let j = fd_jet2(|r, s| (r - s * s).exp(), |_, _| true, 1.0, 1.0, &cfg()).unwrap();
        let a = {
            let r = Jet2::var_r(1.0);
            let s = Jet2::var_s(1.0);
            (r - s * s).exp()
        };
        for (got, want) in [
            (j.v, a.v),
            (j.d_r, a.d_r),
            (j.d_s, a.d_s),
            (j.d_rr, a.d_rr),
            (j.d_rs, a.d_rs),
            (j.d_ss, a.d_ss),
        ] {
            let rel = (got - want).abs() / (1.0 + want.abs());
            assert!(rel <= 1e-6, "got {got}, want {want}");
        }
    }

    #[test]
    fn stencil_domain_guard() {
        let res = fd_jet2(|r, _| r.sqrt(), |r, _| r > 0.5, 0.5, 0.0, &cfg());
        assert!(matches!(res, Err(Error::DomainExit(_))));
    }

    #[test]
    fn field_mixed_partial() {
        // f(z) = z0^2 z1 + sin(z2)
        let f = |z: &[f64]| z[0] * z[0] * z[1] + z[2].sin();
        let c = cfg();
        let field = Field::new(&f, &c);
        let z = [1.2, -0.7, 0.4];
        assert!((field.d1(&z, 0) - 2.0 * 1.2 * -0.7).abs() < 1e-9);
        assert!((field.d2(&z, 0, 1) - 2.0 * 1.2).abs() < 1e-8);
        assert!((field.d2(&z, 2, 2) + 0.4f64.sin()).abs() < 1e-8);
    }
}
