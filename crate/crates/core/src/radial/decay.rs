use super::trace::SphereTrace;
use crate::error::{Error, Result};

/// Smallest magnitude treated as a non-zero coefficient.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayOptions {
    /// Degrees whose maximal coefficient is at or below
    /// `relative_floor · max_k` are excluded from the fit.
    pub relative_floor: f64,
    /// Minimal number of usable degrees for a fit; fewer means the expansion
    /// terminates and `eta = +∞` is reported.
    pub min_degrees: usize,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            relative_floor: 1e-12,
            min_degrees: 5,
        }
    }
}

/// Exponential envelope `|φ_{k,ℓ}| ≤ K e^{-η k}` fitted on a degree window.
///
/// `eta == f64::INFINITY` marks a terminating expansion: fewer than
/// `min_degrees` degrees rise above the floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEstimate {
    pub k_const: f64,
    pub eta: f64,
    /// Largest absolute deviation of `log max_ℓ |φ_{k,ℓ}|` from the fitted line.
    pub residual: f64,
    /// Inclusive degree window used by the fit.
    pub k_range: (usize, usize),
}

impl DecayEstimate {
    pub fn is_terminating(&self) -> bool {
        self.eta == f64::INFINITY
    }

    /// `K e^{-η k}`.
    pub fn envelope(&self, k: usize) -> f64 {
        if self.is_terminating() {
            return if k == 0 { self.k_const } else { 0.0 };
        }
        self.k_const * (-self.eta * k as f64).exp()
    }
}

/// Fits the decay envelope of one sphere trace.
pub fn estimate_decay(trace: &SphereTrace, options: &DecayOptions) -> Result<DecayEstimate> {
    estimate_decay_from_maxima(&trace.degree_maxima(), options)
}

/// Fits `log m_k ≈ log K - η k` where `m_k = max_ℓ |φ_{k,ℓ}|`, over the
/// upper half of the degrees that rise above the floor.
pub fn estimate_decay_from_maxima(maxima: &[f64], options: &DecayOptions) -> Result<DecayEstimate> {
    let scale = maxima.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > UNDERFLOW_FLOOR) {
        return Err(Error::ZeroTrace);
    }
    let floor = (options.relative_floor * scale).max(UNDERFLOW_FLOOR);
    let usable: Vec<usize> = (0..maxima.len())
        .filter(|&k| maxima[k].abs() > floor)
        .collect();
    if usable.len() < options.min_degrees.max(2) {
        return Ok(DecayEstimate {
            k_const: scale,
            eta: f64::INFINITY,
            residual: 0.0,
            k_range: (usable[0], usable[usable.len() - 1]),
        });
    }
    let take = usable
        .len()
        .div_ceil(2)
        .max(options.min_degrees.max(2))
        .min(usable.len());
    let window = &usable[usable.len() - take..];

    let ks: Vec<f64> = window.iter().map(|&k| k as f64).collect();
    let logs: Vec<f64> = window.iter().map(|&k| maxima[k].abs().ln()).collect();
    let count = ks.len() as f64;
    let k_mean = ks.iter().sum::<f64>() / count;
    let log_mean = logs.iter().sum::<f64>() / count;
    let sxx: f64 = ks.iter().map(|k| (k - k_mean) * (k - k_mean)).sum();
    let sxy: f64 = ks
        .iter()
        .zip(&logs)
        .map(|(k, l)| (k - k_mean) * (l - log_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = log_mean - slope * k_mean;
    let residual = ks
        .iter()
        .zip(&logs)
        .map(|(k, l)| (l - (intercept + slope * k)).abs())
        .fold(0.0, f64::max);

    Ok(DecayEstimate {
        k_const: (intercept + residual).exp(),
        eta: -slope,
        residual,
        k_range: (window[0], window[window.len() - 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{build_basis, build_quadrature, ModeIndex, SphereTransform};
    use crate::radial::{sphere_trace_coefficients, AnalyticFunction};
    use std::collections::BTreeMap;

    #[test]
    fn exact_log_linear() {
        let maxima: Vec<f64> = (0..=30).map(|k| 3.0 * (-0.7 * k as f64).exp()).collect();
        let est = estimate_decay_from_maxima(&maxima, &DecayOptions::default()).unwrap();
        assert!((est.eta - 0.7).abs() < 1e-6);
        assert!(est.k_const >= 3.0 * (1.0 - 1e-12) && est.k_const <= 3.0001);
        assert!(est.residual < 1e-12);
    }

    #[test]
    fn alternating_perturbation_keeps_envelope() {
        let maxima: Vec<f64> = (0..=40)
            .map(|k| (-0.5 * k as f64).exp() * (1.0 + 0.01 * if k % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let est = estimate_decay_from_maxima(&maxima, &DecayOptions::default()).unwrap();
        assert!((est.eta - 0.5).abs() < 1e-2);
        for (k, m) in maxima
            .iter()
            .enumerate()
            .take(est.k_range.1 + 1)
            .skip(est.k_range.0)
        {
            assert!(*m <= est.envelope(k) * (1.0 + 1e-12), "k = {k}");
        }
    }

    #[test]
    fn geometric_trace_from_quadrature() {
        let k_top = 20;
        let a: f64 = 0.4;
        let mut profiles = BTreeMap::new();
        for k in 0..=k_top {
            profiles.insert(ModeIndex::new(k, 1), vec![a.powi(k as i32)]);
        }
        let f = AnalyticFunction::finite_mode(3, 1.0, profiles).unwrap();
        let transform = SphereTransform::new(
            build_basis(3, 24).unwrap(),
            build_quadrature(3, 48).unwrap(),
        )
        .unwrap();
        let trace = sphere_trace_coefficients(&f, 1.0, &transform).unwrap();
        let est = estimate_decay(&trace, &DecayOptions::default()).unwrap();
        assert!((est.eta + a.ln()).abs() < 1e-6, "eta = {}", est.eta);
        assert!(est.k_range.1 <= k_top);
    }

    #[test]
    fn zero_and_terminating_traces() {
        assert_eq!(
            estimate_decay_from_maxima(&[0.0; 10], &DecayOptions::default()),
            Err(Error::ZeroTrace)
        );
        let est = estimate_decay_from_maxima(
            &[1.0, 1e-17, 0.0, 1e-18, 0.0, 0.0],
            &DecayOptions::default(),
        )
        .unwrap();
        assert!(est.is_terminating());
        assert_eq!(est.envelope(0), 1.0);
        assert_eq!(est.envelope(3), 0.0);
    }
}
