use rayon::prelude::*;

use super::function::{check_radius, BallFunction};
use crate::error::{Error, Result};
use crate::harmonics::{ModeIndex, ModeLayout, SphereTransform};

/// Relative level below which quadrature-computed trace coefficients are
/// indistinguishable from rounding (see [`SphereTrace::chopped`]).
pub const TRACE_NOISE_FLOOR: f64 = 1e-12;

/// Spherical-harmonic coefficients `φ_{k,ℓ}` of `θ ↦ f(rθ)` on one sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereTrace {
    radius: f64,
    layout: ModeLayout,
    coefficients: Vec<f64>,
    /// `max_i |f(r θ_i)|`, the scale of the quadrature rounding error.
    sample_scale: f64,
}

impl SphereTrace {
    /// Wraps known coefficients (layout order). `sample_scale` defaults to
    /// the coefficient maximum.
    pub fn from_coefficients(
        radius: f64,
        n: usize,
        k_max: usize,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        let layout = ModeLayout::new(n, k_max)?;
        if coefficients.len() != layout.len() {
            return Err(Error::InconsistentInput(format!(
                "{} coefficients for {} modes",
                coefficients.len(),
                layout.len()
            )));
        }
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite trace coefficient {c}"
            )));
        }
        let sample_scale = coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        Ok(Self {
            radius,
            layout,
            coefficients,
            sample_scale,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
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

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn sample_scale(&self) -> f64 {
        self.sample_scale
    }

    pub fn coefficient(&self, mode: ModeIndex) -> Option<f64> {
        self.layout.index_of(mode).map(|i| self.coefficients[i])
    }

    /// `max_ℓ |φ_{k,ℓ}|` for every degree `k ≤ k_max`.
    pub fn degree_maxima(&self) -> Vec<f64> {
        (0..=self.k_max())
            .map(|k| {
                self.coefficients[self.layout.degree_range(k)]
                    .iter()
                    .fold(0.0f64, |m, c| m.max(c.abs()))
            })
            .collect()
    }

    /// Zeroes coefficients with `|φ| ≤ rel · sample_scale`.
    pub fn chopped(&self, rel: f64) -> Self {
        let floor = rel * self.sample_scale;
        let coefficients = self
            .coefficients
            .iter()
            .map(|&c| if c.abs() <= floor { 0.0 } else { c })
            .collect();
        Self {
            coefficients,
            ..self.clone()
        }
    }
}

/// `φ_{k,ℓ}(r) = ⟨f(r·), Y_{k,ℓ}⟩` for every mode of the transform's basis.
pub fn sphere_trace_coefficients<F: BallFunction + ?Sized>(
    f: &F,
    r: f64,
    transform: &SphereTransform,
) -> Result<SphereTrace> {
    check_radius(r, f.radius())?;
    if f.dimension() != transform.basis().dimension() {
        return Err(Error::InconsistentInput(format!(
            "function dimension {} differs from basis dimension {}",
            f.dimension(),
            transform.basis().dimension()
        )));
    }
    let values = f.sphere_values(r, transform.rule())?;
    let sample_scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(SphereTrace {
        radius: r,
        layout: transform.basis().layout().clone(),
        coefficients: transform.analyze(&values),
        sample_scale,
    })
}

/// Traces on several spheres (computed in parallel, returned in input order).
pub fn sphere_traces<F: BallFunction + ?Sized>(
    f: &F,
    radii: &[f64],
    transform: &SphereTransform,
) -> Result<Vec<SphereTrace>> {
    radii
        .par_iter()
        .map(|&r| sphere_trace_coefficients(f, r, transform))
        .collect()
}
