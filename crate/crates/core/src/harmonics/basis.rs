use std::f64::consts::SQRT_2;

use super::{ModeIndex, ModeLayout};
use crate::error::{Error, Result};

/// Default degree cap for [`build_basis`].
pub const MAX_BASIS_DEGREE: usize = 64;

/// Real orthonormal spherical harmonics `Y_{k,ℓ}` on S^{n-1}, n ∈ {2, 3},
/// normalized so that `(1/ω_{n-1}) ∫ Y² dθ = 1`.
///
/// Within a degree the ordering is `ℓ = 1` for the zonal (m = 0) harmonic,
/// then `ℓ = 2m` for the cosine and `ℓ = 2m + 1` for the sine partner of
/// azimuthal order `m`.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    layout: ModeLayout,
    /// Three-term recurrence factors for normalized associated Legendre
    /// functions, indexed `k * (k_max + 1) + m` (n = 3 only).
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

/// Builds the basis with the default degree cap.
pub fn build_basis(n: usize, k_max: usize) -> Result<HarmonicBasis> {
    if k_max > MAX_BASIS_DEGREE {
        return Err(Error::DegreeCap {
            k_max,
            cap: MAX_BASIS_DEGREE,
        });
    }
    HarmonicBasis::uncapped(n, k_max)
}

impl HarmonicBasis {
    pub(crate) fn uncapped(n: usize, k_max: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::NoSphere(n));
        }
        if n > 3 {
            return Err(Error::UnsupportedDimension(n));
        }
        let layout = ModeLayout::new(n, k_max)?;
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        if n == 3 {
            let stride = k_max + 1;
            alpha = vec![0.0; stride * stride];
            beta = vec![0.0; stride * stride];
            for k in 0..=k_max {
                for m in 0..k.saturating_sub(1) {
                    let (kf, mf) = (k as f64, m as f64);
                    alpha[k * stride + m] = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
                    let km1 = kf - 1.0;
                    beta[k * stride + m] = ((km1 * km1 - mf * mf) / (4.0 * km1 * km1 - 1.0)).sqrt();
                }
            }
        }
        Ok(Self {
            layout,
            alpha,
            beta,
        })
    }

    pub fn dimension(&self) -> usize {
        self.layout.dimension()
    }

    pub fn k_max(&self) -> usize {
        self.layout.k_max()
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    /// Number of modes with `k ≤ k_max`.
    pub fn len(&self) -> usize {
        self.layout.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layout.is_empty()
    }

    /// Evaluates every `Y_{k,ℓ}` at the unit vector `theta`, writing into
    /// `out` in layout order.
    pub fn eval_all_into(&self, theta: &[f64], out: &mut [f64]) {
        assert_eq!(theta.len(), self.dimension(), "point has wrong dimension");
        assert_eq!(out.len(), self.len(), "output buffer has wrong length");
        match self.dimension() {
            2 => self.eval_circle(theta, out),
            _ => self.eval_sphere(theta, out),
        }
    }

    pub fn eval_all(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_all_into(theta, &mut out);
        out
    }

    /// Evaluates one harmonic.
    pub fn eval(&self, mode: ModeIndex, theta: &[f64]) -> Result<f64> {
        let idx = self.layout.index_of(mode).ok_or(Error::InvalidMode {
            mode,
            n: self.dimension(),
        })?;
        Ok(self.eval_all(theta)[idx])
    }

    fn eval_circle(&self, theta: &[f64], out: &mut [f64]) {
        let phi = theta[1].atan2(theta[0]);
        out[0] = 1.0;
        for k in 1..=self.k_max() {
            let (s, c) = (k as f64 * phi).sin_cos();
            let base = self.layout.degree_range(k).start;
            out[base] = SQRT_2 * c;
            out[base + 1] = SQRT_2 * s;
        }
    }

    fn eval_sphere(&self, theta: &[f64], out: &mut [f64]) {
        let k_max = self.k_max();
        let stride = k_max + 1;
        let z = theta[2].clamp(-1.0, 1.0);
        let s = theta[0].hypot(theta[1]);
        let phi = theta[1].atan2(theta[0]);

        // Normalized P_m^m, then upward in k at fixed m.
        let mut pmm = 1.0;
        for m in 0..=k_max {
            if m > 0 {
                let mf = m as f64;
                pmm *= s * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
            }
            let (sin_m, cos_m) = (m as f64 * phi).sin_cos();
            let mut write = |k: usize, p: f64| {
                let base = self.layout.degree_range(k).start;
                if m == 0 {
                    out[base] = p;
                } else {
                    out[base + 2 * m - 1] = SQRT_2 * p * cos_m;
                    out[base + 2 * m] = SQRT_2 * p * sin_m;
                }
            };
            write(m, pmm);
            if m == k_max {
                break;
            }
            let mut p_prev = pmm;
            let mut p_curr = (2.0 * m as f64 + 3.0).sqrt() * z * pmm;
            write(m + 1, p_curr);
            for k in (m + 2)..=k_max {
                let idx = k * stride + m;
                let p_next = self.alpha[idx] * (z * p_curr - self.beta[idx] * p_prev);
                p_prev = p_curr;
                p_curr = p_next;
                write(k, p_curr);
            }
        }
    }
}
