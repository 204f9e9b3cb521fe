use crate::error::{Error, Result};
use crate::harmonics::SphereTransform;
use crate::interp::{
    interpolate_general, l2_error_on_sphere, KnotSet, PolyharmonicInterpolant, SphereError,
};
use crate::radial::{radial_profiles, seminorm, BallFunction, ProfileOptions, SeminormEstimate};

/// `R^{2N} s^{N+1}`: the error bound with the constant set to 1.
pub fn theorem1_bound(radius: f64, order: usize, seminorm_value: f64) -> f64 {
    radius.powi(2 * order as i32) * seminorm_value.powi(order as i32 + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    pub radius: f64,
    pub order: usize,
    pub seminorm: f64,
    pub k_tail: usize,
    /// `R ‖f|_N`.
    pub product: f64,
    /// `product < 1`.
    pub satisfied: bool,
    pub bound_shape: f64,
    pub measured_errors: Vec<SphereError>,
    pub max_error: f64,
    pub max_error_radius: f64,
    /// `max_error / bound_shape` (0 when both vanish, +∞ when only the bound does).
    pub empirical_ratio: f64,
}

/// Measures `‖f - h‖` on the probe spheres and compares with the bound shape.
pub fn check_theorem1<F: BallFunction + ?Sized>(
    f: &F,
    h: &PolyharmonicInterpolant,
    seminorm: &SeminormEstimate,
    transform: &SphereTransform,
    probe_radii: &[f64],
) -> Result<Theorem1Report> {
    if seminorm.order != h.order() {
        return Err(Error::InconsistentInput(format!(
            "seminorm of order {} for an interpolant of order {}",
            seminorm.order,
            h.order()
        )));
    }
    if probe_radii.is_empty() {
        return Err(Error::InvalidArgument("no probe radii".into()));
    }
    let radius = h.radius();
    let measured_errors = probe_radii
        .iter()
        .map(|&r| l2_error_on_sphere(f, h, r, transform))
        .collect::<Result<Vec<_>>>()?;
    let (max_error, max_error_radius) =
        measured_errors
            .iter()
            .fold((0.0f64, probe_radii[0]), |(m, at), e| {
                if e.direct > m {
                    (e.direct, e.radius)
                } else {
                    (m, at)
                }
            });
    let product = radius * seminorm.value;
    let bound_shape = theorem1_bound(radius, h.order(), seminorm.value);
    let empirical_ratio = if bound_shape > 0.0 {
        max_error / bound_shape
    } else if max_error == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(Theorem1Report {
        radius,
        order: h.order(),
        seminorm: seminorm.value,
        k_tail: seminorm.k_tail,
        product,
        satisfied: product < 1.0,
        bound_shape,
        measured_errors,
        max_error,
        max_error_radius,
        empirical_ratio,
    })
}

/// How the knot radii of a General knot set are placed for order `N`.
#[derive(Debug, Clone, PartialEq)]
pub enum KnotRule {
    /// `r_j = j R / (2N)`: all knots in `[0, R/2)`.
    Clustered,
    /// `r_j = j R / (N - 1)`: equispaced on `[0, R]`.
    Equispaced,
    /// Explicit radii; the order is their count.
    Fixed(Vec<f64>),
}

impl KnotRule {
    pub fn radii(&self, order: usize, radius: f64) -> Vec<f64> {
        match self {
            KnotRule::Clustered => (0..order)
                .map(|j| j as f64 * radius / (2 * order) as f64)
                .collect(),
            KnotRule::Equispaced if order == 1 => vec![0.0],
            KnotRule::Equispaced => (0..order)
                .map(|j| j as f64 * radius / (order - 1) as f64)
                .collect(),
            KnotRule::Fixed(r) => r.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Sweep {
    pub reports: Vec<Theorem1Report>,
    /// Maximal errors never increase from one order to the next.
    pub errors_non_increasing: bool,
    /// `max / min` of the empirical ratios (+∞ if one is 0 or +∞).
    pub ratio_spread: f64,
}

pub fn summarize_theorem1(reports: Vec<Theorem1Report>) -> Theorem1Sweep {
    let errors_non_increasing = reports
        .windows(2)
        .all(|w| w[1].max_error <= w[0].max_error * (1.0 + 1e-12));
    let (lo, hi) = reports.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.empirical_ratio), hi.max(r.empirical_ratio))
    });
    let ratio_spread = if lo > 0.0 && hi.is_finite() {
        hi / lo
    } else {
        f64::INFINITY
    };
    Theorem1Sweep {
        reports,
        errors_non_increasing,
        ratio_spread,
    }
}

/// Parameters of an error-bound sweep over several orders.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Setup {
    pub orders: Vec<usize>,
    pub k_max: usize,
    pub k_tail: usize,
    pub knots: KnotRule,
    pub probe_radii: Vec<f64>,
    pub profile: ProfileOptions,
}

/// Profiles `f` once, then for each order builds the General interpolant on
/// the rule's knots and checks it.
pub fn theorem1_sweep<F: BallFunction + ?Sized>(
    f: &F,
    transform: &SphereTransform,
    setup: &Theorem1Setup,
) -> Result<Theorem1Sweep> {
    if transform.basis().k_max() < setup.k_max {
        return Err(Error::InconsistentInput(format!(
            "transform degree {} is below k_max = {}",
            transform.basis().k_max(),
            setup.k_max
        )));
    }
    let profiles: Vec<_> = radial_profiles(f, transform, &setup.profile)?
        .into_iter()
        .filter(|p| p.mode().k <= setup.k_max)
        .collect();
    let reports = setup
        .orders
        .iter()
        .map(|&order| {
            let knots = KnotSet::general(setup.knots.radii(order, f.radius()));
            let h = interpolate_general(f.dimension(), &profiles, &knots, order, setup.k_max)?;
            let s = seminorm(&profiles, order, setup.k_tail)?;
            check_theorem1(f, &h, &s, transform, &setup.probe_radii)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_theorem1(reports))
}
