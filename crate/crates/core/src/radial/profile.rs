use rayon::prelude::*;

use super::function::BallFunction;
use super::trace::{sphere_traces, SphereTrace, TRACE_NOISE_FLOOR};
use crate::chebyshev::{lobatto_points, ChebyshevSeries, CHOP_TOLERANCE};
use crate::error::{Error, Result};
use crate::harmonics::{ModeIndex, SphereTransform};

/// Controls how radial profiles are sampled and represented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    /// Degree of the Chebyshev representation in `t`.
    pub cheb_degree: usize,
    /// Smallest sampled radius as a fraction of `R`; division by `r^k` is
    /// avoided below it.
    pub r_min_fraction: f64,
    /// Trace coefficients at or below this fraction of the sphere's sample
    /// scale are treated as zero.
    pub trace_floor: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            cheb_degree: 32,
            r_min_fraction: 1.0 / 20.0,
            trace_floor: TRACE_NOISE_FLOOR,
        }
    }
}

impl ProfileOptions {
    /// Minimum number of sample radii accepted.
    pub fn min_samples(&self) -> usize {
        2 * self.cheb_degree
    }

    /// Default sampling radii: Chebyshev-Lobatto points in `t = r²` on
    /// `[(r_min)², R²]`, returned as ascending radii.
    pub fn sample_radii(&self, radius: f64) -> Vec<f64> {
        let r_min = self.r_min_fraction * radius;
        lobatto_points(r_min * r_min, radius * radius, self.min_samples())
            .into_iter()
            .map(f64::sqrt)
            .collect()
    }
}

/// The radial profile `f_{k,ℓ}` of one mode, with the raw trace it came from.
///
/// `trace(r) = f_{k,ℓ}(r²) r^k`; the profile is a Chebyshev series fitted on
/// `[r_0², R²]` and evaluated by extension on the whole of `[0, R²]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    mode: ModeIndex,
    radius: f64,
    radii: Vec<f64>,
    trace: Vec<f64>,
    profile: ChebyshevSeries,
    fit_degree: usize,
}

impl RadialProfile {
    pub fn mode(&self) -> ModeIndex {
        self.mode
    }

    /// Ball radius `R`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn sample_radii(&self) -> &[f64] {
        &self.radii
    }

    /// Raw trace samples `f̃_{k,ℓ}(r_i)`.
    pub fn trace_samples(&self) -> &[f64] {
        &self.trace
    }

    pub fn series(&self) -> &ChebyshevSeries {
        &self.profile
    }

    /// Configured Chebyshev degree (before trailing-noise removal).
    pub fn fit_degree(&self) -> usize {
        self.fit_degree
    }

    /// `f_{k,ℓ}(t)`.
    pub fn value(&self, t: f64) -> f64 {
        self.profile.eval(t)
    }

    /// `f_{k,ℓ}(r²) r^k`.
    pub fn trace_value(&self, r: f64) -> f64 {
        self.value(r * r) * r.powi(self.mode.k as i32)
    }

    /// Profile scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            trace: self.trace.iter().map(|v| v * factor).collect(),
            profile: self.profile.scaled(factor),
            ..self.clone()
        }
    }

    /// Builds a profile from a known function of `t`, sampled on the default
    /// radii of `options`.
    pub fn from_profile_fn<G: Fn(f64) -> f64>(
        mode: ModeIndex,
        radius: f64,
        profile: G,
        options: &ProfileOptions,
    ) -> Result<Self> {
        let radii = options.sample_radii(radius);
        let trace: Vec<f64> = radii
            .iter()
            .map(|&r| profile(r * r) * r.powi(mode.k as i32))
            .collect();
        let floors = vec![0.0; radii.len()];
        fit_profile(mode, radius, radii, trace, &floors, options)
    }
}

fn validate_radii(radii: &[f64], radius: f64, options: &ProfileOptions) -> Result<()> {
    if radii.len() < options.min_samples() {
        return Err(Error::InsufficientSamples {
            got: radii.len(),
            need: options.min_samples(),
        });
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(
            "radii must be strictly increasing".into(),
        ));
    }
    let r_min = options.r_min_fraction * radius;
    if radii[0] < r_min * (1.0 - 1e-12) {
        return Err(Error::InvalidGrid(format!(
            "smallest radius {} is below r_min = {r_min}",
            radii[0]
        )));
    }
    if radii[radii.len() - 1] > radius * (1.0 + 1e-12) {
        return Err(Error::OutOfDomain {
            r: radii[radii.len() - 1],
            radius,
        });
    }
    Ok(())
}

fn fit_profile(
    mode: ModeIndex,
    radius: f64,
    radii: Vec<f64>,
    trace: Vec<f64>,
    floors: &[f64],
    options: &ProfileOptions,
) -> Result<RadialProfile> {
    validate_radii(&radii, radius, options)?;
    let lo = radii[0] * radii[0];
    let hi = radius * radius;
    let silent = trace.iter().zip(floors).all(|(v, floor)| v.abs() <= *floor);
    let profile = if silent {
        ChebyshevSeries::zero(lo, hi)
    } else {
        let ts: Vec<f64> = radii.iter().map(|r| r * r).collect();
        let values: Vec<f64> = radii
            .iter()
            .zip(&trace)
            .map(|(r, v)| v / r.powi(mode.k as i32))
            .collect();
        ChebyshevSeries::fit(lo, hi, &ts, &values, options.cheb_degree)?.chopped(CHOP_TOLERANCE)
    };
    Ok(RadialProfile {
        mode,
        radius,
        radii,
        trace,
        profile,
        fit_degree: options.cheb_degree,
    })
}

/// Profiles of every mode from traces on increasing radii (all traces must
/// share one layout).
pub fn profiles_from_traces(
    traces: &[SphereTrace],
    radius: f64,
    options: &ProfileOptions,
) -> Result<Vec<RadialProfile>> {
    let first = traces.first().ok_or(Error::InsufficientSamples {
        got: 0,
        need: options.min_samples(),
    })?;
    if traces.iter().any(|t| t.layout() != first.layout()) {
        return Err(Error::InconsistentInput(
            "traces use different mode layouts".into(),
        ));
    }
    let radii: Vec<f64> = traces.iter().map(SphereTrace::radius).collect();
    validate_radii(&radii, radius, options)?;
    let floors: Vec<f64> = traces
        .iter()
        .map(|t| options.trace_floor * t.sample_scale())
        .collect();
    let modes: Vec<ModeIndex> = first.layout().modes().collect();
    modes
        .par_iter()
        .enumerate()
        .map(|(idx, &mode)| {
            let trace = traces.iter().map(|t| t.coefficients()[idx]).collect();
            fit_profile(mode, radius, radii.clone(), trace, &floors, options)
        })
        .collect()
}

/// Radial profile of one mode of `f`, sampled on `radii`.
pub fn radial_profile<F: BallFunction + ?Sized>(
    f: &F,
    mode: ModeIndex,
    radii: &[f64],
    transform: &SphereTransform,
    options: &ProfileOptions,
) -> Result<RadialProfile> {
    let idx = transform
        .basis()
        .layout()
        .index_of(mode)
        .ok_or(Error::InvalidMode {
            mode,
            n: transform.basis().dimension(),
        })?;
    validate_radii(radii, f.radius(), options)?;
    let traces = sphere_traces(f, radii, transform)?;
    let trace = traces.iter().map(|t| t.coefficients()[idx]).collect();
    let floors: Vec<f64> = traces
        .iter()
        .map(|t| options.trace_floor * t.sample_scale())
        .collect();
    fit_profile(mode, f.radius(), radii.to_vec(), trace, &floors, options)
}

/// Profiles of every mode of the transform's basis, sampled on the default
/// radii.
pub fn radial_profiles<F: BallFunction + ?Sized>(
    f: &F,
    transform: &SphereTransform,
    options: &ProfileOptions,
) -> Result<Vec<RadialProfile>> {
    let radii = options.sample_radii(f.radius());
    let traces = sphere_traces(f, &radii, transform)?;
    profiles_from_traces(&traces, f.radius(), options)
}
