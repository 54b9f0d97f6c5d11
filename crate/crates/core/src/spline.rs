//! Natural cubic spline interpolation on strictly increasing knots.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots (zero at both ends).
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "spline knots ({}) and values ({}) differ in length",
                x.len(),
                y.len()
            )));
        }
        let n = x.len();
        if n < 2 {
            return Err(Error::TooShort {
                what: "spline knots",
                needed: 2,
                got: n,
            });
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("spline knots must be strictly increasing".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second-derivative system.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn eval_segment(&self, i: usize, t: f64) -> f64 {
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    fn segment_of(&self, t: f64) -> usize {
        let last = self.x.len() - 2;
        match self.x.partition_point(|&k| k <= t) {
            0 => 0,
            p => (p - 1).min(last),
        }
    }

    /// Value at `t`; outside the knot range the end cubics are extended.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_segment(self.segment_of(t), t)
    }

    /// Evaluate at non-decreasing points in one sweep.
    pub fn eval_sorted(&self, ts: impl IntoIterator<Item = f64>) -> Vec<f64> {
        let last = self.x.len() - 2;
        let mut seg = 0;
        ts.into_iter()
            .map(|t| {
                while seg < last && t >= self.x[seg + 1] {
                    seg += 1;
                }
                self.eval_segment(seg, t)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_knots() {
        let x = [0.0, 0.5, 1.7, 2.0, 3.1];
        let y = [1.0, -2.0, 0.3, 4.0, 4.5];
        let s = CubicSpline::natural(&x, &y).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-12);
        }
    }

    #[test]
    fn reproduces_lines_exactly() {
        let x: Vec<f64> = (0..10).map(|i| f64::from(i) * 0.7 + 0.1 * f64::from(i % 3)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let s = CubicSpline::natural(&x, &y).unwrap();
        for t in [0.05, 1.3, 4.4, 6.0, 7.5] {
            assert!((s.eval(t) - (3.0 * t - 2.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn smooth_function_is_accurate() {
        let x: Vec<f64> = (0..=40).map(|i| f64::from(i) * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let s = CubicSpline::natural(&x, &y).unwrap();
        let ts: Vec<f64> = (0..400).map(|i| 0.5 + f64::from(i) * 0.0075).collect();
        let swept = s.eval_sorted(ts.iter().copied());
        for (t, v) in ts.iter().zip(swept) {
            assert!((v - t.sin()).abs() < 1e-4);
            assert_eq!(v, s.eval(*t));
        }
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(CubicSpline::natural(&[0.0, 0.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(CubicSpline::natural(&[0.0], &[1.0]).is_err());
    }
}
