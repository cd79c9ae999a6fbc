//! Second-order forward-mode jets in the invariant coordinates (r, s).
//!
//! A [`Jet2`] carries a scalar value together with its first and second
//! partials in (r, s). Arithmetic propagates derivatives through the chain
//! rule, so any closed-form profile built from jets yields machine-accurate
//! partials with no differencing.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value and partials of a scalar function of (r, s) up to second order.
///
/// `d_rs` stores the single mixed partial; both differentiation orders are
/// represented by it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d_r: f64,
    pub d_s: f64,
    pub d_rr: f64,
    pub d_rs: f64,
    pub d_ss: f64,
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2::constant(0.0);

    pub const fn new(v: f64, d_r: f64, d_s: f64, d_rr: f64, d_rs: f64, d_ss: f64) -> Self {
        Jet2 {
            v,
            d_r,
            d_s,
            d_rr,
            d_rs,
            d_ss,
        }
    }

    /// Constant: all partials vanish.
    pub const fn constant(v: f64) -> Self {
        Jet2 {
            v,
            d_r: 0.0,
            d_s: 0.0,
            d_rr: 0.0,
            d_rs: 0.0,
            d_ss: 0.0,
        }
    }

    /// The r coordinate itself, seeded with dr/dr = 1.
    pub const fn var_r(r: f64) -> Self {
        Jet2 {
            v: r,
            d_r: 1.0,
            d_s: 0.0,
            d_rr: 0.0,
            d_rs: 0.0,
            d_ss: 0.0,
        }
    }

    /// The s coordinate itself, seeded with ds/ds = 1.
    pub const fn var_s(s: f64) -> Self {
        Jet2 {
            v: s,
            d_r: 0.0,
            d_s: 1.0,
            d_rr: 0.0,
            d_rs: 0.0,
            d_ss: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.d_r.is_finite()
            && self.d_s.is_finite()
            && self.d_rr.is_finite()
            && self.d_rs.is_finite()
            && self.d_ss.is_finite()
    }

    /// Largest absolute entry; used to normalize residuals scale-free.
    pub fn max_abs(&self) -> f64 {
        self.v
            .abs()
            .max(self.d_r.abs())
            .max(self.d_s.abs())
            .max(self.d_rr.abs())
            .max(self.d_rs.abs())
            .max(self.d_ss.abs())
    }

    /// Lift a scalar function with known first and second derivative through
    /// the chain rule.
    fn compose(self, f: f64, df: f64, ddf: f64) -> Self {
        Jet2 {
            v: f,
            d_r: df * self.d_r,
            d_s: df * self.d_s,
            d_rr: ddf * self.d_r * self.d_r + df * self.d_rr,
            d_rs: ddf * self.d_r * self.d_s + df * self.d_rs,
            d_ss: ddf * self.d_s * self.d_s + df * self.d_ss,
        }
    }

    pub fn sqrt(self) -> Self {
        let q = self.v.sqrt();
        self.compose(q, 0.5 / q, -0.25 / (q * q * q))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        self.compose(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v))
    }

    pub fn sin(self) -> Self {
        self.compose(self.v.sin(), self.v.cos(), -self.v.sin())
    }

    pub fn cos(self) -> Self {
        self.compose(self.v.cos(), -self.v.sin(), -self.v.cos())
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        self.compose(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    /// Real power with constant exponent.
    pub fn powf(self, a: f64) -> Self {
        let f = self.v.powf(a);
        self.compose(
            f,
            a * self.v.powf(a - 1.0),
            a * (a - 1.0) * self.v.powf(a - 2.0),
        )
    }

    pub fn scale(self, c: f64) -> Self {
        Jet2 {
            v: c * self.v,
            d_r: c * self.d_r,
            d_s: c * self.d_s,
            d_rr: c * self.d_rr,
            d_rs: c * self.d_rs,
            d_ss: c * self.d_ss,
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + rhs.v,
            d_r: self.d_r + rhs.d_r,
            d_s: self.d_s + rhs.d_s,
            d_rr: self.d_rr + rhs.d_rr,
            d_rs: self.d_rs + rhs.d_rs,
            d_ss: self.d_ss + rhs.d_ss,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v - rhs.v,
            d_r: self.d_r - rhs.d_r,
            d_s: self.d_s - rhs.d_s,
            d_rr: self.d_rr - rhs.d_rr,
            d_rs: self.d_rs - rhs.d_rs,
            d_ss: self.d_ss - rhs.d_ss,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * rhs.v,
            d_r: self.d_r * rhs.v + self.v * rhs.d_r,
            d_s: self.d_s * rhs.v + self.v * rhs.d_s,
            d_rr: self.d_rr * rhs.v + 2.0 * self.d_r * rhs.d_r + self.v * rhs.d_rr,
            d_rs: self.d_rs * rhs.v + self.d_r * rhs.d_s + self.d_s * rhs.d_r + self.v * rhs.d_rs,
            d_ss: self.d_ss * rhs.v + 2.0 * self.d_s * rhs.d_s + self.v * rhs.d_ss,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)] // f/g as f * (1/g) jets
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: f64) -> Jet2 {
        Jet2 {
            v: self.v + rhs,
            ..self
        }
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: f64) -> Jet2 {
        Jet2 {
            v: self.v - rhs,
            ..self
        }
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn product_rule_bilinear() {
        // f = r*s at (2,3)
        let j = Jet2::var_r(2.0) * Jet2::var_s(3.0);
        assert_eq!(j.v, 6.0);
        assert_eq!(j.d_r, 3.0);
        assert_eq!(j.d_s, 2.0);
        assert_eq!(j.d_rs, 1.0);
        assert_eq!(j.d_rr, 0.0);
        assert_eq!(j.d_ss, 0.0);
    }

    #[test]
    fn exp_of_r_minus_s_squared() {
        // f = exp(r - s^2) at (1,1): value 1, and every partial is known.
        let r = Jet2::var_r(1.0);
        let s = Jet2::var_s(1.0);
        let f = (r - s * s).exp();
        assert_close(f.v, 1.0, 1e-15);
        assert_close(f.d_r, 1.0, 1e-14); // e^t
        assert_close(f.d_s, -2.0, 1e-14); // -2s e^t
        assert_close(f.d_rr, 1.0, 1e-14);
        assert_close(f.d_rs, -2.0, 1e-14);
        assert_close(f.d_ss, 2.0, 1e-14); // (4s^2 - 2) e^t
    }

    #[test]
    fn quotient_and_sqrt() {
        // f = sqrt(s^2 + 1) / (1 - r) at (0.5, 0.3)
        let r = Jet2::var_r(0.5);
        let s = Jet2::var_s(0.3);
        let f = (s * s + 1.0).sqrt() / (-r + 1.0);
        let q = (0.3f64 * 0.3 + 1.0).sqrt();
        assert_close(f.v, q / 0.5, 1e-14);
        // d/dr = sqrt(s^2+1)/(1-r)^2
        assert_close(f.d_r, q / 0.25, 1e-13);
        // d/ds = s/(sqrt(s^2+1)(1-r))
        assert_close(f.d_s, 0.3 / (q * 0.5), 1e-13);
        // d2/dr2 = 2 sqrt(s^2+1)/(1-r)^3
        assert_close(f.d_rr, 2.0 * q / 0.125, 1e-12);
        // d2/drds = s/(sqrt(s^2+1)(1-r)^2)
        assert_close(f.d_rs, 0.3 / (q * 0.25), 1e-13);
        // d2/ds2 = (1/(s^2+1)^{3/2})/(1-r)
        assert_close(f.d_ss, 1.0 / (q * q * q * 0.5), 1e-13);
    }

    #[test]
    fn powf_matches_manual() {
        let r = Jet2::var_r(2.0);
        let f = r.powf(0.75);
        assert_close(f.v, 2f64.powf(0.75), 1e-15);
        assert_close(f.d_r, 0.75 * 2f64.powf(-0.25), 1e-15);
        assert_close(f.d_rr, 0.75 * -0.25 * 2f64.powf(-1.25), 1e-15);
    }
}
