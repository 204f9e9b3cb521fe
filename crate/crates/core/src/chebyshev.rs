//! Chebyshev series on an interval `[lo, hi]`: least-squares fitting,
//! Clenshaw evaluation (also outside the interval) and exact coefficient
//! differentiation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative threshold below which trailing coefficients are treated as
/// rounding noise by [`ChebyshevSeries::chopped`].
pub const CHOP_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeries {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

/// Chebyshev-Lobatto points of `[lo, hi]` in ascending order.
pub fn lobatto_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "need at least two Lobatto points");
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                mid - half * (PI * i as f64 / (count - 1) as f64).cos()
            }
        })
        .collect()
}

impl ChebyshevSeries {
    pub fn new(lo: f64, hi: f64, coeffs: Vec<f64>) -> Self {
        assert!(hi > lo, "empty Chebyshev interval");
        Self { lo, hi, coeffs }
    }

    /// The zero series.
    pub fn zero(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, Vec::new())
    }

    /// Least-squares fit of degree `degree` to samples `(ts[i], values[i])`.
    pub fn fit(lo: f64, hi: f64, ts: &[f64], values: &[f64], degree: usize) -> Result<Self> {
        if ts.len() != values.len() {
            return Err(Error::InconsistentInput(format!(
                "{} abscissae vs {} values",
                ts.len(),
                values.len()
            )));
        }
        if ts.len() < degree + 1 {
            return Err(Error::InsufficientSamples {
                got: ts.len(),
                need: degree + 1,
            });
        }
        if !(hi > lo) {
            return Err(Error::InvalidGrid(format!(
                "interval [{lo}, {hi}] is empty"
            )));
        }
        let mut a = DMatrix::zeros(ts.len(), degree + 1);
        for (i, &t) in ts.iter().enumerate() {
            let x = (2.0 * t - (lo + hi)) / (hi - lo);
            let (mut prev, mut curr) = (1.0, x);
            a[(i, 0)] = 1.0;
            if degree >= 1 {
                a[(i, 1)] = x;
            }
            for j in 2..=degree {
                let next = 2.0 * x * curr - prev;
                a[(i, j)] = next;
                prev = curr;
                curr = next;
            }
        }
        let b = DVector::from_column_slice(values);
        let coeffs = a
            .svd(true, true)
            .solve(&b, 1e-14)
            .map_err(|e| Error::InvalidGrid(format!("least-squares solve failed: {e}")))?;
        Ok(Self::new(lo, hi, coeffs.iter().copied().collect()))
    }

    /// Interpolates `f` at the `degree + 1` Chebyshev points of the first kind.
    pub fn interpolate<F: Fn(f64) -> f64>(lo: f64, hi: f64, degree: usize, f: F) -> Self {
        let m = degree + 1;
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let samples: Vec<f64> = (0..m)
            .map(|i| f(mid + half * (PI * (i as f64 + 0.5) / m as f64).cos()))
            .collect();
        let coeffs = (0..m)
            .map(|j| {
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (PI * j as f64 * (i as f64 + 0.5) / m as f64).cos())
                    .sum();
                if j == 0 {
                    s / m as f64
                } else {
                    2.0 * s / m as f64
                }
            })
            .collect();
        Self::new(lo, hi, coeffs)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree of the stored series (`None` for the empty/zero series).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Clenshaw evaluation; valid for any `t`, extrapolating outside `[lo, hi]`.
    pub fn eval(&self, t: f64) -> f64 {
        let x = (2.0 * t - (self.lo + self.hi)) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        match self.coeffs.first() {
            Some(&c0) => x * b1 - b2 + c0,
            None => 0.0,
        }
    }

    /// Exact derivative with respect to `t`.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero(self.lo, self.hi);
        }
        let mut d = vec![0.0; n - 1];
        // d_{j-1} = d_{j+1} + 2 j c_j, then halve d_0.
        for j in (1..n).rev() {
            let upper = if j + 1 < n - 1 { d[j + 1] } else { 0.0 };
            d[j - 1] = upper + 2.0 * j as f64 * self.coeffs[j];
        }
        d[0] *= 0.5;
        let scale = 2.0 / (self.hi - self.lo);
        d.iter_mut().for_each(|c| *c *= scale);
        Self::new(self.lo, self.hi, d)
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |s, _| s.derivative())
    }

    /// Drops trailing coefficients with magnitude `≤ tol · max|c|`.
    pub fn chopped(&self, tol: f64) -> Self {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.abs() > tol * scale)
            .map_or(0, |p| p + 1);
        Self::new(self.lo, self.hi, self.coeffs[..keep].to_vec())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.lo,
            self.hi,
            self.coeffs.iter().map(|c| c * factor).collect(),
        )
    }

    /// `max |s(t)|` over `samples` equispaced points of `[a, b]` (endpoints included).
    pub fn max_abs_on(&self, a: f64, b: f64, samples: usize) -> f64 {
        let samples = samples.max(2);
        (0..samples)
            .map(|i| {
                self.eval(a + (b - a) * i as f64 / (samples - 1) as f64)
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interpolates_exponential() {
        let s = ChebyshevSeries::interpolate(0.0, 2.0, 24, f64::exp);
        for i in 0..=50 {
            let t = 2.0 * i as f64 / 50.0;
            assert_abs_diff_eq!(s.eval(t), t.exp(), epsilon = 1e-13 * t.exp());
        }
    }

    #[test]
    fn least_squares_fit_reproduces_polynomial() {
        let ts = lobatto_points(0.25, 1.0, 40);
        let vs: Vec<f64> = ts.iter().map(|t| 1.0 - 3.0 * t + 0.5 * t * t * t).collect();
        let s = ChebyshevSeries::fit(0.25, 1.0, &ts, &vs, 20)
            .unwrap()
            .chopped(CHOP_TOLERANCE);
        assert!(s.degree().unwrap() <= 3);
        // Extrapolation to t = 0 of an exact cubic.
        assert_abs_diff_eq!(s.eval(0.0), 1.0, epsilon = 1e-12);
        assert!(s.nth_derivative(4).coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn derivatives_of_exponential() {
        // Each differentiation costs roughly a digit.
        let s =
            ChebyshevSeries::interpolate(0.0, 1.0, 30, |t| (2.0 * t).exp()).chopped(CHOP_TOLERANCE);
        for order in 0..=4 {
            let d = s.nth_derivative(order);
            for t in [0.0f64, 0.3, 1.0] {
                let exact = 2f64.powi(order as i32) * (2.0 * t).exp();
                assert_abs_diff_eq!(d.eval(t), exact, epsilon = 1e-7 * exact);
            }
        }
    }

    #[test]
    fn derivative_of_low_degree_is_exact_zero() {
        let s = ChebyshevSeries::new(-1.0, 3.0, vec![1.0, 2.0, -0.5]);
        assert!(
            s.nth_derivative(3).coeffs().is_empty()
                || s.nth_derivative(3).coeffs().iter().all(|&c| c == 0.0)
        );
        assert_eq!(s.nth_derivative(3).eval(0.7), 0.0);
    }

    #[test]
    fn fit_rejects_short_input() {
        let err = ChebyshevSeries::fit(0.0, 1.0, &[0.0, 1.0], &[1.0, 2.0], 4).unwrap_err();
        assert_eq!(err, Error::InsufficientSamples { got: 2, need: 5 });
    }
}
