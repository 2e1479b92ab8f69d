//! Shape-preserving piecewise cubic Hermite interpolation (Fritsch–Carlson
//! slopes with the usual three-point end conditions).

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)
}

fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if !same_sign(d, m0) {
        0.0
    } else if !same_sign(m0, m1) && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Interpolation(format!(
                "need matching knot and value arrays of length >= 2, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Interpolation("non-finite knot data".into()));
        }
        if let Some(w) = x.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Interpolation(format!(
                "knots must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let m: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = m[0];
            d[1] = m[0];
        } else {
            for k in 1..n - 1 {
                if same_sign(m[k - 1], m[k]) {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
                }
            }
            d[0] = end_slope(h[0], h[1], m[0], m[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
        }
        Ok(MonotoneCubic { x, y, d })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value and first three derivatives at `a`.
    pub fn derivatives(&self, a: f64) -> Result<[f64; 4]> {
        let (lo, hi) = self.domain();
        if !(a >= lo && a <= hi) {
            return Err(Error::Interpolation(format!(
                "a = {a} is outside the knot range [{lo}, {hi}]"
            )));
        }
        let k = self.x.partition_point(|&xk| xk <= a).clamp(1, self.x.len() - 1) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (a - self.x[k]) / h;
        let (y0, y1, d0, d1) = (self.y[k], self.y[k + 1], self.d[k] * h, self.d[k + 1] * h);
        // Cubic in s: c0 + c1 s + c2 s^2 + c3 s^3.
        let c0 = y0;
        let c1 = d0;
        let c2 = 3.0 * (y1 - y0) - 2.0 * d0 - d1;
        let c3 = 2.0 * (y0 - y1) + d0 + d1;
        Ok([
            c0 + s * (c1 + s * (c2 + s * c3)),
            (c1 + s * (2.0 * c2 + 3.0 * s * c3)) / h,
            (2.0 * c2 + 6.0 * s * c3) / (h * h),
            6.0 * c3 / (h * h * h),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let p = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((p.derivatives(*xi).unwrap()[0] - yi).abs() < 1e-14);
        }
        let d = p.derivatives(1.01).unwrap();
        assert!((d[1] - 2.0).abs() < 1e-13 && d[2].abs() < 1e-12);
    }

    #[test]
    fn preserves_monotonicity() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 1.0, 1.0, 1.0];
        let p = MonotoneCubic::new(x, y).unwrap();
        let mut prev = -1.0;
        for i in 0..=400 {
            let v = p.derivatives(i as f64 * 0.01).unwrap()[0];
            assert!(v >= prev - 1e-15 && (-1e-15..=1.0 + 1e-15).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn smooth_data_is_accurate() {
        let x: Vec<f64> = (0..60).map(|i| i as f64 / 59.0).collect();
        let y: Vec<f64> = x.iter().map(|v| (1.0 + 4.0 * v * v).sqrt()).collect();
        let p = MonotoneCubic::new(x, y).unwrap();
        let a: f64 = 0.437;
        let d = p.derivatives(a).unwrap();
        assert!((d[0] - (1.0 + 4.0 * a * a).sqrt()).abs() < 1e-5);
        assert!((d[1] - 4.0 * a / (1.0 + 4.0 * a * a).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0], vec![1.0]).is_err());
        let p = MonotoneCubic::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(p.derivatives(1.5), Err(Error::Interpolation(_))));
    }
}
