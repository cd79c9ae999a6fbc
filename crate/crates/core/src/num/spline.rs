//! Natural cubic splines, one- and two-dimensional.
//!
//! Backs the tabulated profile: a tensor grid of p(r, s) samples becomes a
//! C^2 surface whose jets feed the same residual machinery as the
//! closed-form families.

use crate::error::{Error, Result};

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// second derivative at each knot
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 3 {
            return Err(Error::InvalidParameter(
                "spline needs >= 3 knots with matching values".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        // Thomas algorithm for the tridiagonal natural-spline system.
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    pub fn min_x(&self) -> f64 {
        self.xs[0]
    }

    pub fn max_x(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.clamp(1, self.xs.len() - 1) - 1,
        }
    }

    /// (value, first, second) derivative at x (clamped extrapolation is the
    /// caller's responsibility; domains are enforced upstream).
    pub fn eval2(&self, x: f64) -> (f64, f64, f64) {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let v = a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0;
        let d = (self.ys[i + 1] - self.ys[i]) / h
            + (-(3.0 * a * a - 1.0) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0;
        let dd = a * self.m[i] + b * self.m[i + 1];
        (v, d, dd)
    }
}

/// Tensor-product spline surface over an (r, s) grid; values are row-major
/// with the r index outermost.
#[derive(Debug, Clone)]
pub struct SplineSurface {
    r_grid: Vec<f64>,
    /// one s-spline per r grid line
    rows: Vec<CubicSpline>,
}

impl SplineSurface {
    pub fn new(r_grid: &[f64], s_grid: &[f64], values: &[Vec<f64>]) -> Result<Self> {
        if values.len() != r_grid.len() || values.iter().any(|row| row.len() != s_grid.len()) {
            return Err(Error::InvalidParameter(
                "tabulated values must form an (r_grid x s_grid) matrix".into(),
            ));
        }
        if r_grid.len() < 3 {
            return Err(Error::InvalidParameter("need >= 3 r grid lines".into()));
        }
        if r_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "r grid must be strictly increasing".into(),
            ));
        }
        let rows = values
            .iter()
            .map(|row| CubicSpline::new(s_grid, row))
            .collect::<Result<Vec<_>>>()?;
        Ok(SplineSurface {
            r_grid: r_grid.to_vec(),
            rows,
        })
    }

    pub fn r_range(&self) -> (f64, f64) {
        (self.r_grid[0], *self.r_grid.last().unwrap())
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.rows[0].min_x(), self.rows[0].max_x())
    }

    /// Full jet (v, d_r, d_s, d_rr, d_rs, d_ss) at (r, s): splines along s on
    /// each grid line produce value/d_s/d_ss columns, then splines across r
    /// differentiate each column in r.
    pub fn jet(&self, r: f64, s: f64) -> Result<(f64, f64, f64, f64, f64, f64)> {
        let mut col_v = Vec::with_capacity(self.rows.len());
        let mut col_d = Vec::with_capacity(self.rows.len());
        let mut col_dd = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let (v, d, dd) = row.eval2(s);
            col_v.push(v);
            col_d.push(d);
            col_dd.push(dd);
        }
        let sp_v = CubicSpline::new(&self.r_grid, &col_v)?;
        let sp_d = CubicSpline::new(&self.r_grid, &col_d)?;
        let sp_dd = CubicSpline::new(&self.r_grid, &col_dd)?;
        let (v, d_r, d_rr) = sp_v.eval2(r);
        let (d_s, d_rs, _) = sp_d.eval2(r);
        let (d_ss, _, _) = sp_dd.eval2(r);
        Ok((v, d_r, d_s, d_rr, d_rs, d_ss))
    }
}
