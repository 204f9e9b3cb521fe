use crate::error::{Error, Result};
use crate::interp::{interpolate_spheres, l2_norm_ball};
use crate::radial::{estimate_decay, DecayEstimate, DecayOptions, SphereTrace};

/// Decay fit on one knot sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereDecay {
    pub radius: f64,
    pub decay: DecayEstimate,
    /// `e^{-η_j} / r_j` (0 for a terminating expansion).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Report {
    pub radius: f64,
    pub spheres: Vec<SphereDecay>,
    /// `M = max_j e^{-η_j} / r_j`.
    pub max_ratio: f64,
    /// `R M`.
    pub product: f64,
    /// `product < 1`.
    pub satisfied: bool,
    /// `min_j (x_j - x_{j-1})` over `x_j = r_j²` (+∞ for a single sphere).
    pub delta: f64,
    /// `S_K` of the ball-norm series of the sphere interpolant.
    pub partial_sums: Vec<f64>,
    /// Observed geometric ratio of the series increments, when measurable.
    pub tail_ratio: Option<f64>,
}

/// Geometric-mean ratio `(d_K / d_{K₀})^{1/(K-K₀)}` over the upper half of
/// positive increments `d`.
pub fn tail_ratio(increments: &[f64]) -> Option<f64> {
    let last = increments.iter().rposition(|&d| d > 0.0)?;
    let mut first = last;
    while first > 0 && increments[first - 1] > 0.0 {
        first -= 1;
    }
    let start = first + (last - first) / 2;
    if last <= start {
        return None;
    }
    Some((increments[last] / increments[start]).powf(1.0 / (last - start) as f64))
}

pub fn check_theorem2(
    radius: f64,
    traces: &[SphereTrace],
    radii: &[f64],
    options: &DecayOptions,
) -> Result<Theorem2Report> {
    let first = traces
        .first()
        .ok_or(Error::InsufficientSamples { got: 0, need: 1 })?;
    let h = interpolate_spheres(radius, traces, radii, first.k_max())?;
    let spheres = traces
        .iter()
        .zip(radii)
        .map(|(trace, &r)| {
            let decay = estimate_decay(trace, options)?;
            let ratio = if decay.is_terminating() {
                0.0
            } else {
                (-decay.eta).exp() / r
            };
            Ok(SphereDecay {
                radius: r,
                decay,
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = spheres.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let product = radius * max_ratio;
    let delta = radii
        .windows(2)
        .map(|w| w[1] * w[1] - w[0] * w[0])
        .fold(f64::INFINITY, f64::min);
    let norm = l2_norm_ball(&h, false);
    let tail_ratio = tail_ratio(&norm.degree_totals);
    Ok(Theorem2Report {
        radius,
        spheres,
        max_ratio,
        product,
        satisfied: product < 1.0,
        delta,
        partial_sums: norm.partial_sums,
        tail_ratio,
    })
}
