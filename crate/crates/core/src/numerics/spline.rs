//! Natural cubic spline interpolation with analytic derivative and integral.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at the knots
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(Error::invalid(
                "spline data",
                format!("need ≥ 3 matching points, got {} / {}", x.len(), y.len()),
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("spline data", "abscissae must increase"));
        }
        let n = x.len();
        // tridiagonal system for natural boundary conditions (m[0] = m[n-1] = 0)
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        // Thomas algorithm
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
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn segment(&self, t: f64) -> usize {
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.clamp(1, self.x.len() - 1) - 1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    /// ∫_{x_0}^{t} of the spline.
    pub fn integral(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let mut acc = 0.0;
        for j in 0..i {
            acc += self.segment_integral(j, self.x[j + 1]);
        }
        acc + self.segment_integral(i, t)
    }

    fn segment_integral(&self, i: usize, upto: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let b = (upto - self.x[i]) / h;
        let a = 1.0 - b;
        // ∫ over [x_i, upto] of the cubic segment
        h * (self.y[i] * (1.0 - a * a) / 2.0 + self.y[i + 1] * b * b / 2.0)
            + h * h * h / 6.0
                * (self.m[i] * (a * a / 2.0 - a * a * a * a / 4.0 - 0.25)
                    + self.m[i + 1] * (b * b * b * b / 4.0 - b * b / 2.0))
    }

    /// Cumulative integral evaluated at every knot (starts at 0).
    pub fn cumulative_at_knots(&self) -> Vec<f64> {
        let n = self.x.len();
        let mut out = vec![0.0; n];
        for i in 0..n - 1 {
            out[i + 1] = out[i] + self.segment_integral(i, self.x[i + 1]);
        }
        out
    }
}
