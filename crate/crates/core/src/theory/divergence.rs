use std::fmt;

use crate::error::{Error, Result};
use crate::harmonics::{mode_dimension, ModeLayout};
use crate::interp::{interpolate_spheres, l2_norm_ball};
use crate::radial::SphereTrace;

use super::theorem2::tail_ratio;

/// Largest degree accepted by [`divergence_demo`].
pub const DIVERGENCE_MAX_DEGREE: usize = 400;

/// `S_K` must exceed this multiple of `S_0` for a divergence verdict.
pub const GROWTH_THRESHOLD: f64 = 1e6;

/// `|C R - 1|` at or below this counts as the boundary case.
const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Diverging,
    Converging,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Diverging => "diverging",
            Verdict::Converging => "converging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceDemo {
    pub c: f64,
    pub radius: f64,
    pub n: usize,
    pub radii: Vec<f64>,
    pub k_max: usize,
    pub all_ell: bool,
    /// Ball-norm integral of mode `(k, 1)` for each degree.
    pub mode_integrals: Vec<f64>,
    /// `C^{2k} R^{2k+1} / (2k+1)`.
    pub mode_closed_form: Vec<f64>,
    /// `k^{n-2} C^{2k} R^{2k+1} / (2k+1)`.
    pub closed_form_terms: Vec<f64>,
    /// Closed-form increment of the populated data: the mode closed form
    /// times `d_k` (all ℓ) or 1 (single ℓ).
    pub expected_increments: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub increments: Vec<f64>,
    /// `max_k |mode_integral - closed form| / closed form`.
    pub max_integral_deviation: f64,
    /// `max_k |increment - expected| / expected`.
    pub max_increment_deviation: f64,
    /// Smallest `k₀ ≥ 1` with strictly increasing increments on `k₀..=k_max`.
    pub increasing_from: Option<usize>,
    pub tail_ratio: Option<f64>,
    pub verdict: Verdict,
}

impl DivergenceDemo {
    pub fn order(&self) -> usize {
        self.radii.len()
    }
}

fn relative_deviation(got: &[f64], expect: &[f64]) -> f64 {
    got.iter()
        .zip(expect)
        .map(|(g, e)| {
            if *e == 0.0 {
                g.abs()
            } else {
                ((g - e) / e).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Sphere data `φ^j_{k,ℓ} = (C r_j)^k`, interpolated on the given spheres,
/// and the partial sums of its ball-norm series.
pub fn divergence_demo(
    c: f64,
    radius: f64,
    n: usize,
    radii: &[f64],
    k_max: usize,
    all_ell: bool,
) -> Result<DivergenceDemo> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("C = {c} must be positive")));
    }
    let cr = c * radius;
    if (cr - 1.0).abs() <= BOUNDARY_TOLERANCE {
        return Err(Error::BoundaryCase(cr));
    }
    if k_max > DIVERGENCE_MAX_DEGREE {
        return Err(Error::DegreeCap {
            k_max,
            cap: DIVERGENCE_MAX_DEGREE,
        });
    }
    let layout = ModeLayout::new(n, k_max)?;
    let traces = radii
        .iter()
        .map(|&r| {
            let mut coeffs = vec![0.0; layout.len()];
            for k in 0..=k_max {
                let value = (c * r).powi(k as i32);
                let range = layout.degree_range(k);
                let range = if all_ell {
                    range
                } else {
                    range.start..range.start + 1
                };
                coeffs[range].iter_mut().for_each(|v| *v = value);
            }
            SphereTrace::from_coefficients(r, n, k_max, coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    let h = interpolate_spheres(radius, &traces, radii, k_max)?;
    let norm = l2_norm_ball(&h, false);

    let mode_integrals: Vec<f64> = (0..=k_max)
        .map(|k| norm.per_mode[layout.degree_range(k).start])
        .collect();
    let mode_closed_form: Vec<f64> = (0..=k_max)
        .map(|k| c.powi(2 * k as i32) * radius.powi(2 * k as i32 + 1) / (2 * k + 1) as f64)
        .collect();
    let closed_form_terms: Vec<f64> = mode_closed_form
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64).powi(n as i32 - 2) * v)
        .collect();
    let expected_increments = mode_closed_form
        .iter()
        .enumerate()
        .map(|(k, v)| {
            Ok(if all_ell {
                mode_dimension(n, k)? as f64 * v
            } else {
                *v
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let increments = norm.degree_totals.clone();
    let increasing_from = if k_max == 0 {
        None
    } else {
        let mut k0 = k_max;
        while k0 > 1 && increments[k0 - 1] < increments[k0] {
            k0 -= 1;
        }
        (k0 < k_max).then_some(k0)
    };
    let tail_ratio = tail_ratio(&increments);
    let s0 = norm.partial_sums[0];
    let last = norm.partial_sums[k_max];
    let verdict = if cr > 1.0 && last > GROWTH_THRESHOLD * s0 && increasing_from.is_some() {
        Verdict::Diverging
    } else if cr < 1.0 && tail_ratio.is_some_and(|q| q < 1.0) {
        Verdict::Converging
    } else {
        Verdict::Inconclusive
    };
    Ok(DivergenceDemo {
        c,
        radius,
        n,
        radii: radii.to_vec(),
        k_max,
        all_ell,
        max_integral_deviation: relative_deviation(&mode_integrals, &mode_closed_form),
        max_increment_deviation: relative_deviation(&increments, &expected_increments),
        mode_integrals,
        mode_closed_form,
        closed_form_terms,
        expected_increments,
        partial_sums: norm.partial_sums,
        increments,
        increasing_from,
        tail_ratio,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const RADII: [f64; 3] = [0.5, 0.75, 1.0];

    #[test]
    fn diverging_case() {
        let demo = divergence_demo(1.2, 1.0, 3, &RADII, 200, false).unwrap();
        assert_eq!(demo.verdict, Verdict::Diverging);
        assert!(
            demo.max_integral_deviation < 1e-10,
            "{}",
            demo.max_integral_deviation
        );
        assert!(demo.increasing_from.unwrap() <= 30);
        assert!(demo.partial_sums[200] > GROWTH_THRESHOLD * demo.partial_sums[0]);
    }

    #[test]
    fn converging_case() {
        let demo = divergence_demo(0.8, 1.0, 3, &RADII, 200, false).unwrap();
        assert_eq!(demo.verdict, Verdict::Converging);
        assert!((demo.tail_ratio.unwrap() - 0.64).abs() < 0.05);
        let (s100, s200) = (demo.partial_sums[100], demo.partial_sums[200]);
        assert!((s200 - s100).abs() < 1e-6 * s100);
    }

    #[test]
    fn single_term_and_boundary() {
        let demo = divergence_demo(1.3, 0.9, 3, &[0.4, 0.9], 0, false).unwrap();
        assert!((demo.partial_sums[0] - 0.9).abs() < 1e-15);
        assert_eq!(demo.verdict, Verdict::Inconclusive);
        assert_eq!(
            divergence_demo(2.0, 0.5, 3, &RADII[..1], 10, false).unwrap_err(),
            Error::BoundaryCase(1.0)
        );
        assert!(matches!(
            divergence_demo(1.2, 1.0, 3, &RADII, 401, false),
            Err(Error::DegreeCap { .. })
        ));
    }

    #[test]
    fn all_ell_weights_match_dimension() {
        for n in [2, 3] {
            let demo = divergence_demo(1.1, 1.0, n, &RADII, 30, true).unwrap();
            assert!(
                demo.max_increment_deviation < 1e-9,
                "n = {n}: {}",
                demo.max_increment_deviation
            );
            for k in 1..=30 {
                // d_k ≥ k^{n-2}, so the populated increments dominate the closed-form terms.
                assert!(demo.increments[k] >= demo.closed_form_terms[k] * (1.0 - 1e-9));
            }
        }
    }
}
