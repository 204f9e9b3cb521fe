use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lagrange::{fit_mode_polynomial, ModePolynomial, MAX_ORDER};
use crate::error::{Error, Result};
use crate::harmonics::{HarmonicBasis, ModeIndex, ModeLayout};
use crate::radial::{check_radius, RadialProfile, SphereTrace};

/// Relative tolerance when matching trace radii against knot radii.
const RADIUS_MATCH: f64 = 1e-12;

/// Knot radii of one mode that differ from the shared default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeKnots {
    pub k: usize,
    pub ell: usize,
    pub radii: Vec<f64>,
}

/// Where the interpolation conditions are imposed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum KnotSet {
    /// Per-mode radii `r_{k,ℓ,j}`; modes without an override use `default`.
    General {
        default: Vec<f64>,
        overrides: Vec<ModeKnots>,
    },
    /// Concentric spheres shared by all modes.
    Spheres { radii: Vec<f64> },
}

impl KnotSet {
    pub fn spheres(radii: Vec<f64>) -> Self {
        KnotSet::Spheres { radii }
    }

    pub fn general(default: Vec<f64>) -> Self {
        KnotSet::General {
            default,
            overrides: Vec::new(),
        }
    }

    /// Replaces the knots of one mode (General variant only).
    pub fn with_override(mut self, mode: ModeIndex, radii: Vec<f64>) -> Result<Self> {
        match &mut self {
            KnotSet::General { overrides, .. } => {
                overrides.retain(|o| (o.k, o.ell) != (mode.k, mode.ell));
                overrides.push(ModeKnots {
                    k: mode.k,
                    ell: mode.ell,
                    radii,
                });
                overrides.sort_by_key(|o| (o.k, o.ell));
                Ok(self)
            }
            KnotSet::Spheres { .. } => Err(Error::InvalidArgument(
                "sphere knots are shared by all modes".into(),
            )),
        }
    }

    /// Order `N` (number of knots per mode).
    pub fn order(&self) -> usize {
        match self {
            KnotSet::General { default, .. } => default.len(),
            KnotSet::Spheres { radii } => radii.len(),
        }
    }

    pub fn radii_for(&self, mode: ModeIndex) -> &[f64] {
        match self {
            KnotSet::General { default, overrides } => overrides
                .iter()
                .find(|o| o.k == mode.k && o.ell == mode.ell)
                .map_or(default.as_slice(), |o| o.radii.as_slice()),
            KnotSet::Spheres { radii } => radii,
        }
    }

    /// Checks orders, ranges and the variant's ordering rules against `R`.
    pub fn validate(&self, radius: f64) -> Result<()> {
        let order = self.order();
        if order == 0 || order > MAX_ORDER {
            return Err(Error::OrderCap {
                order,
                cap: MAX_ORDER,
            });
        }
        let check = |radii: &[f64]| -> Result<()> {
            if radii.len() != order {
                return Err(Error::InconsistentInput(format!(
                    "{} knots where order {order} expected",
                    radii.len()
                )));
            }
            radii.iter().try_for_each(|&r| check_radius(r, radius))
        };
        match self {
            KnotSet::General { default, overrides } => {
                check(default)?;
                overrides.iter().try_for_each(|o| check(&o.radii))
            }
            KnotSet::Spheres { radii } => {
                check(radii)?;
                if !(radii[0] > 0.0) {
                    return Err(Error::InvalidGrid("sphere radii must be positive".into()));
                }
                if radii.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidGrid(
                        "sphere radii must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// `h(x) = Σ_{k ≤ k_max} Σ_ℓ h_{k,ℓ}(r²) r^k Y_{k,ℓ}(θ)` with every
/// `h_{k,ℓ}` of degree `≤ N-1`.
#[derive(Debug, Clone)]
pub struct PolyharmonicInterpolant {
    order: usize,
    radius: f64,
    knots: KnotSet,
    modes: Vec<ModePolynomial>,
    basis: HarmonicBasis,
}

impl PartialEq for PolyharmonicInterpolant {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.radius == other.radius
            && self.knots == other.knots
            && self.modes == other.modes
            && self.basis.layout() == other.basis.layout()
    }
}

impl PolyharmonicInterpolant {
    /// Assembles an interpolant from mode polynomials given in layout order.
    pub fn from_modes(
        n: usize,
        k_max: usize,
        radius: f64,
        knots: KnotSet,
        modes: Vec<ModePolynomial>,
    ) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ball radius {radius} must be positive"
            )));
        }
        knots.validate(radius)?;
        let basis = HarmonicBasis::uncapped(n, k_max)?;
        let layout = basis.layout();
        if modes.len() != layout.len() {
            return Err(Error::InconsistentInput(format!(
                "{} mode polynomials for {} modes",
                modes.len(),
                layout.len()
            )));
        }
        let order = knots.order();
        for (i, p) in modes.iter().enumerate() {
            if p.mode() != layout.mode_at(i) {
                return Err(Error::InconsistentInput(format!(
                    "mode {} found where {} expected",
                    p.mode(),
                    layout.mode_at(i)
                )));
            }
            if p.order() != order {
                return Err(Error::InconsistentInput(format!(
                    "mode {} has order {}",
                    p.mode(),
                    p.order()
                )));
            }
        }
        Ok(Self {
            order,
            radius,
            knots,
            modes,
            basis,
        })
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k_max(&self) -> usize {
        self.basis.k_max()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn knots(&self) -> &KnotSet {
        &self.knots
    }

    pub fn layout(&self) -> &ModeLayout {
        self.basis.layout()
    }

    pub fn basis(&self) -> &HarmonicBasis {
        &self.basis
    }

    /// Mode polynomials in layout order.
    pub fn modes(&self) -> &[ModePolynomial] {
        &self.modes
    }

    pub fn mode(&self, mode: ModeIndex) -> Option<&ModePolynomial> {
        self.layout().index_of(mode).map(|i| &self.modes[i])
    }

    /// Sphere coefficients `r^k h_{k,ℓ}(r²)` in layout order.
    pub fn sphere_coefficients(&self, r: f64) -> Result<Vec<f64>> {
        check_radius(r, self.radius)?;
        let t = r * r;
        let layout = self.layout();
        let mut out = Vec::with_capacity(layout.len());
        let mut rk = 1.0;
        for k in 0..=self.k_max() {
            out.extend(
                self.modes[layout.degree_range(k)]
                    .iter()
                    .map(|p| rk * p.eval(t)),
            );
            rk *= r;
        }
        Ok(out)
    }

    /// `h(rθ)`, summed in ascending `(k, ℓ)` order.
    pub fn evaluate(&self, r: f64, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.dimension() {
            return Err(Error::InvalidArgument(format!(
                "direction has {} components, expected {}",
                theta.len(),
                self.dimension()
            )));
        }
        let coeffs = self.sphere_coefficients(r)?;
        let ys = self.basis.eval_all(theta);
        Ok(coeffs.iter().zip(&ys).fold(0.0, |acc, (c, y)| acc + c * y))
    }
}

fn check_order(order: usize, knots: &KnotSet) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::OrderCap {
            order,
            cap: MAX_ORDER,
        });
    }
    if knots.order() != order {
        return Err(Error::InconsistentInput(format!(
            "knot set has order {}, requested {order}",
            knots.order()
        )));
    }
    Ok(())
}

/// Interpolates every profile at its squared knots: `h_{k,ℓ}(r²_{k,ℓ,j}) =
/// f_{k,ℓ}(r²_{k,ℓ,j})`. Knots may include `r = 0`.
pub fn interpolate_general(
    n: usize,
    profiles: &[RadialProfile],
    knots: &KnotSet,
    order: usize,
    k_max: usize,
) -> Result<PolyharmonicInterpolant> {
    check_order(order, knots)?;
    if !matches!(knots, KnotSet::General { .. }) {
        return Err(Error::InvalidArgument(
            "interpolate_general needs a General knot set".into(),
        ));
    }
    let radius = profiles
        .first()
        .map(RadialProfile::radius)
        .ok_or(Error::IncompleteInput(ModeIndex::new(0, 1)))?;
    if profiles.iter().any(|p| p.radius() != radius) {
        return Err(Error::InconsistentInput(
            "profiles disagree on the ball radius".into(),
        ));
    }
    knots.validate(radius)?;
    let by_mode: HashMap<ModeIndex, &RadialProfile> =
        profiles.iter().map(|p| (p.mode(), p)).collect();
    let layout = ModeLayout::new(n, k_max)?;
    let modes: Vec<ModeIndex> = layout.modes().collect();
    let polys = modes
        .par_iter()
        .map(|&mode| {
            let profile = by_mode.get(&mode).ok_or(Error::IncompleteInput(mode))?;
            let knots_t: Vec<f64> = knots.radii_for(mode).iter().map(|r| r * r).collect();
            let values = knots_t.iter().map(|&t| profile.value(t)).collect();
            ModePolynomial::new(mode, knots_t, values)
        })
        .collect::<Result<Vec<_>>>()?;
    PolyharmonicInterpolant::from_modes(n, k_max, radius, knots.clone(), polys)
}

/// Interpolates sphere traces: `h(r_j θ) = f(r_j θ)` for the modes `k ≤ k_max`.
pub fn interpolate_spheres(
    radius: f64,
    traces: &[SphereTrace],
    radii: &[f64],
    k_max: usize,
) -> Result<PolyharmonicInterpolant> {
    let knots = KnotSet::spheres(radii.to_vec());
    check_order(traces.len(), &knots)?;
    knots.validate(radius)?;
    let first = &traces[0];
    for (j, (trace, &r)) in traces.iter().zip(radii).enumerate() {
        if trace.dimension() != first.dimension() || trace.k_max() != first.k_max() {
            return Err(Error::InconsistentInput(format!(
                "trace {j} has (n, k_max) = ({}, {}), trace 0 has ({}, {})",
                trace.dimension(),
                trace.k_max(),
                first.dimension(),
                first.k_max()
            )));
        }
        if (trace.radius() - r).abs() > RADIUS_MATCH * radius {
            return Err(Error::InconsistentInput(format!(
                "trace {j} lies on r = {}, knot is {r}",
                trace.radius()
            )));
        }
    }
    if k_max > first.k_max() {
        return Err(Error::InconsistentInput(format!(
            "k_max = {k_max} exceeds the traces' k_max = {}",
            first.k_max()
        )));
    }
    let n = first.dimension();
    let layout = ModeLayout::new(n, k_max)?;
    let modes: Vec<ModeIndex> = layout.modes().collect();
    let polys = modes
        .par_iter()
        .enumerate()
        .map(|(idx, &mode)| {
            // Layouts are nested, so index idx addresses the same mode in the traces.
            let data: Vec<f64> = traces.iter().map(|t| t.coefficients()[idx]).collect();
            fit_mode_polynomial(mode, radii, &data)
        })
        .collect::<Result<Vec<_>>>()?;
    PolyharmonicInterpolant::from_modes(n, k_max, radius, knots, polys)
}
