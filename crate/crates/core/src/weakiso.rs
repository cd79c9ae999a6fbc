//! Weakly isotropic curvature verification.
//!
//! A scalar-curvature spray is weakly isotropic when a 1-homogeneous factor
//! Gamma = |y| gamma(r, s) and a 1-form theta = a(r) <x, y> satisfy
//!
//!   Gamma_{y^k} R = tau_k Gamma
//!   tau_k = R_{y^k}/2 + (3/2)(Gamma_{y^k} theta - Gamma theta_k).
//!
//! For projectively flat spherically symmetric sprays both conditions
//! reduce along the vector s y_k - |y| x_k to two scalar equations in
//! (r, s); this module evaluates the reduced system, reruns the ambient
//! vector conditions independently, and fits a(r) from a given gamma.

use nalgebra::DVector;

use crate::curvature::scalar_data;
use crate::error::{Error, Result};
use crate::num::invariants::{invariant_partials, PointPair};
use crate::num::jet::Jet2;
use crate::spray::Profile;

/// The two reduced residuals; both vanish identically for a witness pair.
#[derive(Debug, Clone, Copy)]
pub struct WeakIsoResiduals {
    pub res1: f64,
    pub res2: f64,
}

/// Reduced system at one (r, s):
///
///   res1 = 2 s g p_rs + g p_ss + (2 s p_r - p^2 + p_s) g_s
///          - (-p p_s + 4 p_r) g
///   res2 = a s g_s - 2 s p_rs - a g + 2 p_r - p_ss
pub fn weak_iso_residuals(p_jet: &Jet2, gamma_jet: &Jet2, a_val: f64, s: f64) -> WeakIsoResiduals {
    let p = p_jet;
    let g = gamma_jet;
    let res1 =
        2.0 * s * g.v * p.d_rs + g.v * p.d_ss + (2.0 * s * p.d_r - p.v * p.v + p.d_s) * g.d_s
            - (-p.v * p.d_s + 4.0 * p.d_r) * g.v;
    let res2 = a_val * s * g.d_s - 2.0 * s * p.d_rs - a_val * g.v + 2.0 * p.d_r - p.d_ss;
    WeakIsoResiduals { res1, res2 }
}

/// Ambient residual vectors of the two defining conditions, evaluated
/// directly from the curvature data rather than through the reduction.
#[derive(Debug, Clone)]
pub struct AmbientResiduals {
    pub a9: DVector<f64>,
    pub a10: DVector<f64>,
    /// |y| (1 + |R|/|y|^2 + ||tau||/|y|); the two conditions have different
    /// homogeneity degrees, this keeps both comparisons scale-aware.
    pub normalizer: f64,
}

impl AmbientResiduals {
    pub fn a9_norm(&self) -> f64 {
        self.a9.norm() / self.normalizer
    }

    pub fn a10_norm(&self) -> f64 {
        self.a10.norm() / self.normalizer
    }
}

/// Evaluate the ambient conditions for Gamma = |y| gamma(r,s) and
/// theta = a(r) <x, y>. Gamma_{y^k} is assembled analytically through the
/// invariant partials; the reduction identity under test must not feed
/// itself differenced inputs.
pub fn ambient_weakiso_check(
    p: &dyn Profile,
    gamma: &dyn Profile,
    a_of_r: &dyn Fn(f64) -> f64,
    pair: &PointPair,
) -> Result<AmbientResiduals> {
    let ip = invariant_partials(pair)?;
    let (r, s) = (ip.r, ip.s);
    let ny = ip.norm_y;
    let n = pair.dim();

    let sd = scalar_data(p, pair)?;
    let p_jet = p.jet(r, s)?;
    let g_jet = gamma.jet(r, s)?;
    let a_val = a_of_r(r);

    let big_gamma = ny * g_jet.v;
    let theta = a_val * pair.x.dot(&pair.y);

    // R_{y^k} = 2 y_k (p^2 - 2 s p_r - p_s)
    //           + |y|^2 s_{y^k} (2 p p_s - 2 p_r - 2 s p_rs - p_ss)
    let r_tilde = p_jet.v * p_jet.v - 2.0 * s * p_jet.d_r - p_jet.d_s;
    let d_coef = 2.0 * p_jet.v * p_jet.d_s - 2.0 * p_jet.d_r - 2.0 * s * p_jet.d_rs - p_jet.d_ss;

    let mut a9 = DVector::zeros(n);
    let mut a10 = DVector::zeros(n);
    for k in 0..n {
        let gamma_yk = pair.y[k] / ny * g_jet.v + ny * g_jet.d_s * ip.ds_dy[k];
        let r_yk = 2.0 * pair.y[k] * r_tilde + ny * ny * ip.ds_dy[k] * d_coef;
        let theta_k = a_val * pair.x[k];

        a9[k] = gamma_yk * sd.r_scalar - sd.tau[k] * big_gamma;
        a10[k] = sd.tau[k] - 0.5 * r_yk - 1.5 * (gamma_yk * theta - big_gamma * theta_k);
    }

    let normalizer = ny * (1.0 + sd.r_scalar.abs() / (ny * ny) + sd.tau.norm() / ny);
    Ok(AmbientResiduals {
        a9,
        a10,
        normalizer,
    })
}

/// One fitted a(r) level.
#[derive(Debug, Clone, Copy)]
pub struct AFitRow {
    pub r: f64,
    pub a: f64,
    /// max over the s-samples of |rhs/d - a| / (1 + |a|)
    pub max_dev: f64,
}

/// Result of fitting a(r) against a fixed gamma.
#[derive(Debug, Clone)]
pub struct AFitReport {
    pub rows: Vec<AFitRow>,
    pub max_dev: f64,
    /// max |res1| over all samples; a genuine witness needs this to vanish
    /// too, since res1 does not involve a at all
    pub res1_max: f64,
    pub witness_ok: bool,
}

/// Fit a(r) per r-level from the second reduced equation rearranged as
/// a (s g_s - g) = 2 s p_rs - 2 p_r + p_ss, by least squares over the
/// s-samples. Consistency (a depending on r only) shows up as small
/// per-point deviation; res1 is evaluated alongside because a witness
/// requires both equations.
pub fn solve_a_given_gamma(
    p: &dyn Profile,
    gamma: &dyn Profile,
    r_levels: &[f64],
    s_samples: &[f64],
    tol: f64,
) -> Result<AFitReport> {
    if r_levels.is_empty() || s_samples.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least one r level and two s samples".into(),
        ));
    }
    let mut rows = Vec::with_capacity(r_levels.len());
    let mut res1_max = 0.0f64;

    for &r in r_levels {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut usable = Vec::new();
        let mut skipped = 0usize;
        for &s in s_samples {
            let pj = p.jet(r, s)?;
            let gj = gamma.jet(r, s)?;
            let d = s * gj.d_s - gj.v;
            let rhs = 2.0 * s * pj.d_rs - 2.0 * pj.d_r + pj.d_ss;
            res1_max = res1_max.max(weak_iso_residuals(&pj, &gj, 0.0, s).res1.abs());
            if d.abs() < 1e-6 * (1.0 + gj.v.abs()) {
                skipped += 1;
                continue;
            }
            num += d * rhs;
            den += d * d;
            usable.push((d, rhs));
        }
        if skipped * 10 > s_samples.len() {
            return Err(Error::IllConditioned(format!(
                "s gamma_s - gamma vanished at {skipped}/{} samples for r = {r}",
                s_samples.len()
            )));
        }
        let a = num / den;
        let max_dev = usable
            .iter()
            .map(|(d, rhs)| (rhs / d - a).abs() / (1.0 + a.abs()))
            .fold(0.0f64, f64::max);
        rows.push(AFitRow { r, a, max_dev });
    }

    let max_dev = rows.iter().map(|row| row.max_dev).fold(0.0f64, f64::max);
    let witness_ok = max_dev <= tol && res1_max <= tol;
    Ok(AFitReport {
        rows,
        max_dev,
        res1_max,
        witness_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{weakiso_example1, weakiso_example2, FunkProfile};
    use crate::sample::SamplePlan;
    use crate::spray::{ExprProfile, ZeroProfile};

    struct One;
    impl Profile for One {
        fn jet(&self, _r: f64, _s: f64) -> Result<Jet2> {
            Ok(Jet2::constant(1.0))
        }
    }

    #[test]
    fn trivial_spray_is_weakly_isotropic() {
        let p = Jet2::ZERO;
        let g = Jet2::constant(1.0);
        let res = weak_iso_residuals(&p, &g, 0.0, 0.7);
        assert_eq!(res.res1, 0.0);
        assert_eq!(res.res2, 0.0);
    }

    #[test]
    fn example1_reduced_residuals() {
        let (p, w) = weakiso_example1(1.0, 1.0).unwrap();
        for (r, s) in SamplePlan::rs_samples(200, 7, (0.05, 0.85)) {
            let pj = p.jet(r, s).unwrap();
            let gj = w.gamma.jet(r, s).unwrap();
            let res = weak_iso_residuals(&pj, &gj, (w.a)(r), s);
            assert!(res.res1.abs() <= 1e-8, "res1 = {} at ({r}, {s})", res.res1);
            assert!(res.res2.abs() <= 1e-8, "res2 = {} at ({r}, {s})", res.res2);
        }
    }

    #[test]
    fn example2_reduced_residuals() {
        let (p, w) = weakiso_example2(1.0, 1.0).unwrap();
        for (r, s) in SamplePlan::rs_samples(200, 9, (0.05, 2.0)) {
            let pj = p.jet(r, s).unwrap();
            let gj = w.gamma.jet(r, s).unwrap();
            let res = weak_iso_residuals(&pj, &gj, (w.a)(r), s);
            assert!(res.res1.abs() <= 1e-7, "res1 = {} at ({r}, {s})", res.res1);
            assert!(res.res2.abs() <= 1e-7, "res2 = {} at ({r}, {s})", res.res2);
        }
    }

    #[test]
    fn ambient_flat_spray_vanishes() {
        let pair = PointPair::from_slices(&[0.4, -0.1, 0.2], &[0.8, 0.5, -0.3]).unwrap();
        let res = ambient_weakiso_check(&ZeroProfile, &One, &|_| 0.0, &pair).unwrap();
        assert_eq!(res.a9.norm(), 0.0);
        assert_eq!(res.a10.norm(), 0.0);
    }

    #[test]
    fn ambient_examples_vanish() {
        let cases = [
            weakiso_example1(1.0, 1.0).unwrap(),
            weakiso_example2(1.0, 1.0).unwrap(),
        ];
        for (p, w) in &cases {
            for pair in SamplePlan::new(3, 100, 15, 0.85).pairs() {
                let res =
                    ambient_weakiso_check(p.as_ref(), w.gamma.as_ref(), &*w.a, &pair).unwrap();
                assert!(res.a9_norm() <= 1e-6, "a9 {}", res.a9_norm());
                assert!(res.a10_norm() <= 1e-6, "a10 {}", res.a10_norm());
            }
        }
    }

    #[test]
    fn ambient_reduces_to_scalar_residuals() {
        // for arbitrary (p, gamma, a), the ambient vectors match the
        // reduced residuals times the displayed vector pattern:
        //   a9 = |y| (s y_k - |y| x_k) res1
        //   a10 = (3/2) (s y_k - |y| x_k) res2
        let p = ExprProfile::new(|r, s| s * s * 0.3 + r * s + (r + 1.0).sqrt(), |_, _| true);
        let gamma = ExprProfile::new(|r, s| (r * 0.2 - s * 0.4 + 2.0).sqrt(), |_, _| true);
        let a_fn = |r: f64| 0.7 / (1.0 + r);
        for pair in SamplePlan::new(4, 50, 33, 1.2).pairs() {
            let ip = invariant_partials(&pair).unwrap();
            let res = ambient_weakiso_check(&p, &gamma, &a_fn, &pair).unwrap();
            let pj = p.jet(ip.r, ip.s).unwrap();
            let gj = gamma.jet(ip.r, ip.s).unwrap();
            let reduced = weak_iso_residuals(&pj, &gj, a_fn(ip.r), ip.s);
            for k in 0..pair.dim() {
                let pattern = ip.s * pair.y[k] - ip.norm_y * pair.x[k];
                let want_a9 = ip.norm_y * pattern * reduced.res1;
                let want_a10 = 1.5 * pattern * reduced.res2;
                assert!(
                    (res.a9[k] - want_a9).abs() / (1.0 + want_a9.abs()) <= 1e-10,
                    "a9[{k}]: {} vs {}",
                    res.a9[k],
                    want_a9
                );
                assert!(
                    (res.a10[k] - want_a10).abs() / (1.0 + want_a10.abs()) <= 1e-10,
                    "a10[{k}]: {} vs {}",
                    res.a10[k],
                    want_a10
                );
            }
        }
    }

    #[test]
    fn residuals_linear_in_gamma_and_a() {
        // superposition in the gamma jet and in a, holding p fixed
        let p = Jet2::new(0.8, -0.2, 0.5, 0.1, 0.3, -0.6);
        let g1 = Jet2::new(1.1, 0.2, -0.4, 0.0, 0.1, 0.5);
        let g2 = Jet2::new(-0.3, 0.7, 0.9, 0.2, -0.5, 0.1);
        let s = 0.62;
        let (a1, a2) = (0.9, -1.7);

        let r1 = weak_iso_residuals(&p, &g1, a1, s);
        let r2 = weak_iso_residuals(&p, &g2, a2, s);
        let sum = weak_iso_residuals(&p, &(g1 + g2), a1 + a2, s);
        // res1 is linear in gamma alone; res2 couples a with gamma, so
        // superposition applies along (gamma, a) jointly only for res1 and
        // for res2 with matched pairs
        assert!((sum.res1 - (r1.res1 + r2.res1)).abs() < 1e-12);
        let coupled = weak_iso_residuals(&p, &(g1 + g2), a1, s);
        let expect = weak_iso_residuals(&p, &g1, a1, s).res2
            + weak_iso_residuals(&p, &g2, a1, s).res2
            + (2.0 * s * p.d_rs - 2.0 * p.d_r + p.d_ss); // rhs double-counted once
        assert!((coupled.res2 - expect).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_closed_form_a() {
        let s_samples: Vec<f64> = (1..=12).map(|i| 0.03 + 0.04 * i as f64).collect();

        let (p1, w1) = weakiso_example1(1.0, 1.0).unwrap();
        let r_levels = [0.1, 0.3, 0.5, 0.7];
        let rep = solve_a_given_gamma(p1.as_ref(), w1.gamma.as_ref(), &r_levels, &s_samples, 1e-6)
            .unwrap();
        assert!(
            rep.witness_ok,
            "max_dev {} res1 {}",
            rep.max_dev, rep.res1_max
        );
        for row in &rep.rows {
            let want = (w1.a)(row.r);
            assert!(
                (row.a - want).abs() / (1.0 + want.abs()) <= 1e-6,
                "a({}) = {} vs {}",
                row.r,
                row.a,
                want
            );
        }

        let (p2, w2) = weakiso_example2(1.0, 1.0).unwrap();
        let rep = solve_a_given_gamma(p2.as_ref(), w2.gamma.as_ref(), &r_levels, &s_samples, 1e-5)
            .unwrap();
        assert!(rep.witness_ok);
        for row in &rep.rows {
            let want = (w2.a)(row.r);
            assert!(
                (row.a - want).abs() / (1.0 + want.abs()) <= 1e-5,
                "a({}) = {} vs {}",
                row.r,
                row.a,
                want
            );
        }
    }

    #[test]
    fn degenerate_gamma_is_ill_conditioned() {
        // gamma = s makes s gamma_s - gamma vanish identically
        let p = FunkProfile { c_lin: 0.0 };
        let gamma = ExprProfile::new(|_, s| s, |_, _| true);
        let s_samples: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
        let res = solve_a_given_gamma(&p, &gamma, &[0.3], &s_samples, 1e-6);
        assert!(matches!(res, Err(crate::error::Error::IllConditioned(_))));
    }

    #[test]
    fn funk_with_unit_gamma_is_not_a_witness() {
        let p = FunkProfile { c_lin: 0.0 };
        let s_samples: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
        let rep = solve_a_given_gamma(&p, &One, &[0.2, 0.4, 0.6], &s_samples, 1e-6).unwrap();
        assert!(!rep.witness_ok);
        assert!(rep.res1_max > 1e-3, "res1 stayed at {}", rep.res1_max);
    }
}
