use super::interpolant::PolyharmonicInterpolant;
use crate::harmonics::ModeIndex;

/// One application of Δ to `Σ_m a_m t^m r^k Y_{k,ℓ}` in dimension `n`:
/// `Δ(r^{k+2m} Y) = 2m(2m + 2k + n - 2) r^{k+2m-2} Y`.
///
/// The result keeps the input length, padded with trailing zeros.
pub fn apply_radial_laplacian(n: usize, k: usize, coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    for m in 1..coeffs.len() {
        let factor = (2 * m * (2 * m + 2 * k + n - 2)) as f64;
        out[m - 1] = coeffs[m] * factor;
    }
    out
}

/// Monomial coefficients of `Δ^p h`, mode by mode.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianPower {
    pub power: usize,
    pub modes: Vec<(ModeIndex, Vec<f64>)>,
    /// `max |coefficient|` of the input.
    pub input_scale: f64,
    /// `max |coefficient|` after `p` applications.
    pub max_abs: f64,
}

impl LaplacianPower {
    /// `max_abs / input_scale` (zero for the zero interpolant).
    pub fn certificate(&self) -> f64 {
        if self.input_scale == 0.0 {
            0.0
        } else {
            self.max_abs / self.input_scale
        }
    }
}

pub fn radial_laplacian_power(h: &PolyharmonicInterpolant, p: usize) -> LaplacianPower {
    let n = h.dimension();
    let input_scale = h
        .modes()
        .iter()
        .flat_map(|m| m.monomial_coeffs())
        .fold(0.0f64, |m, c| m.max(c.abs()));
    let modes: Vec<(ModeIndex, Vec<f64>)> = h
        .modes()
        .iter()
        .map(|poly| {
            let mode = poly.mode();
            let coeffs = (0..p).fold(poly.monomial_coeffs().to_vec(), |c, _| {
                apply_radial_laplacian(n, mode.k, &c)
            });
            (mode, coeffs)
        })
        .collect();
    let max_abs = modes
        .iter()
        .flat_map(|(_, c)| c)
        .fold(0.0f64, |m, c| m.max(c.abs()));
    LaplacianPower {
        power: p,
        modes,
        input_scale,
        max_abs,
    }
}
