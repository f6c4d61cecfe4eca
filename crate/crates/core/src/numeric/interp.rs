//! Cubic interpolation on uniform samples.

use serde::Serialize;

use super::NumericError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InterpKind {
    /// C² natural spline; interpolation error stays smooth, so finite differences
    /// of the resampled function converge.
    #[default]
    NaturalSpline,
    /// Fritsch-Carlson monotone cubic (C¹, no overshoot).
    Monotone,
}

/// Piecewise cubic Hermite form: values and node slopes.
#[derive(Debug, Clone)]
pub struct Cubic {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Cubic {
    /// Samples `y_i` at `x0 + i h`.
    pub fn new(x0: f64, h: f64, y: &[f64], kind: InterpKind) -> Result<Self, NumericError> {
        if y.len() < 3 || !(h > 0.0) {
            return Err(NumericError::DomainError("need ≥ 3 samples and h > 0".into()));
        }
        let m = match kind {
            InterpKind::NaturalSpline => spline_slopes(y, h),
            InterpKind::Monotone => monotone_slopes(y, h),
        };
        Ok(Cubic { x0, h, y: y.to_vec(), m })
    }

    pub fn lo(&self) -> f64 {
        self.x0
    }

    pub fn hi(&self) -> f64 {
        self.x0 + (self.y.len() - 1) as f64 * self.h
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    pub fn eval(&self, x: f64) -> Result<f64, NumericError> {
        if !self.contains(x) {
            return Err(NumericError::InterpolationOutOfRange(format!("{x} outside [{}, {}]", self.lo(), self.hi())));
        }
        let t = (x - self.x0) / self.h;
        let i = (t.floor() as usize).min(self.y.len() - 2);
        let s = t - i as f64;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Ok(h00 * self.y[i] + h10 * self.h * self.m[i] + h01 * self.y[i + 1] + h11 * self.h * self.m[i + 1])
    }
}

/// First derivatives of the natural spline (`y'' = 0` at both ends).
fn spline_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    // 2m_0 + m_1 = 3(y_1 − y_0)/h, m_{i−1} + 4m_i + m_{i+1} = 3(y_{i+1} − y_{i−1})/h, ...
    let mut diag = vec![4.0; n];
    diag[0] = 2.0;
    diag[n - 1] = 2.0;
    let mut rhs: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                3.0 * (y[1] - y[0]) / h
            } else if i == n - 1 {
                3.0 * (y[n - 1] - y[n - 2]) / h
            } else {
                3.0 * (y[i + 1] - y[i - 1]) / h
            }
        })
        .collect();
    for i in 1..n {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - m[i + 1]) / diag[i];
    }
    m
}

fn monotone_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        m[i] = if d[i - 1] * d[i] <= 0.0 { 0.0 } else { 0.5 * (d[i - 1] + d[i]) };
    }
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let (a, b) = (m[i] / d[i], m[i + 1] / d[i]);
        let r = a * a + b * b;
        if r > 9.0 {
            let t = 3.0 / r.sqrt();
            m[i] = t * a * d[i];
            m[i + 1] = t * b * d[i];
        }
    }
    m
}
