use rayon::prelude::*;

use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::harmonics::ModeIndex;

/// Number of equispaced points used for `sup_t` over `[0, R²]`.
pub const SUP_GRID_POINTS: usize = 2001;

/// Estimate of `‖f|_N`: the per-mode quantities
/// `(sup_{0≤t≤R²} |f^{(N)}_{k,ℓ}(t)| / N!)^{1/(k+N+1)}` and their maximum over
/// the tail `k ≥ k_tail` standing in for the limit superior.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormEstimate {
    pub order: usize,
    pub value: f64,
    pub per_mode: Vec<(ModeIndex, f64)>,
    pub k_tail: usize,
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `sup_{0≤t≤R²} |f^{(order)}(t)| / order!` of one profile.
pub fn scaled_derivative_sup(profile: &RadialProfile, order: usize) -> Result<f64> {
    if 2 * order > profile.fit_degree() {
        return Err(Error::IllConditionedDerivative {
            order,
            degree: profile.fit_degree(),
        });
    }
    let r2 = profile.radius() * profile.radius();
    let sup = profile
        .series()
        .nth_derivative(order)
        .max_abs_on(0.0, r2, SUP_GRID_POINTS);
    Ok(sup / factorial(order))
}

/// Seminorm estimate over a set of profiles (all sharing the same `R`).
pub fn seminorm(
    profiles: &[RadialProfile],
    order: usize,
    k_tail: usize,
) -> Result<SeminormEstimate> {
    let top = profiles.iter().map(|p| p.mode().k).max();
    match top {
        None => {
            return Err(Error::InvalidArgument(
                "seminorm needs at least one profile".into(),
            ))
        }
        Some(top) if top < k_tail => {
            return Err(Error::InvalidArgument(format!(
                "k_tail = {k_tail} exceeds the largest degree {top}"
            )))
        }
        _ => {}
    }
    let per_mode = profiles
        .par_iter()
        .map(|p| {
            let k = p.mode().k;
            scaled_derivative_sup(p, order)
                .map(|s| (p.mode(), s.powf(1.0 / (k + order + 1) as f64)))
        })
        .collect::<Result<Vec<_>>>()?;
    let value = per_mode
        .iter()
        .filter(|(m, _)| m.k >= k_tail)
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    Ok(SeminormEstimate {
        order,
        value,
        per_mode,
        k_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::ProfileOptions;

    fn profile<G: Fn(f64) -> f64>(k: usize, radius: f64, g: G) -> RadialProfile {
        RadialProfile::from_profile_fn(ModeIndex::new(k, 1), radius, g, &ProfileOptions::default())
            .unwrap()
    }

    #[test]
    fn low_degree_polynomial_has_zero_seminorm() {
        let p = profile(3, 1.0, |t| 1.0 + 2.0 * t - t * t);
        let est = seminorm(&[p], 3, 0).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn exponential_profile_closed_form() {
        let (c, radius, order) = (1.3f64, 1.2f64, 3usize);
        let p = profile(0, radius, |t| (c * t).exp());
        let est = seminorm(&[p], order, 0).unwrap();
        let exact = (c.powi(order as i32) * (c * radius * radius).exp() / factorial(order))
            .powf(1.0 / (order + 1) as f64);
        assert!(
            (est.value - exact).abs() < 1e-9 * exact,
            "{} vs {exact}",
            est.value
        );
    }

    #[test]
    fn scale_covariance() {
        let base = profile(2, 1.0, |t| (0.8 * t).sin() + 2.0);
        let order = 2;
        let v0 = seminorm(std::slice::from_ref(&base), order, 0)
            .unwrap()
            .value;
        for lambda in [2.0f64, 10.0] {
            let v = seminorm(&[base.scaled(lambda)], order, 0).unwrap().value;
            let expect = v0 * lambda.powf(1.0 / (2 + order + 1) as f64);
            assert!((v - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn gaussian_seminorms_bounded_by_sup_norm() {
        // For e^{-t}: the N = 0 value is sup e^{-t} = 1, later orders shrink.
        // High orders lose digits to the spectral derivative (~1e-4 at N = 8).
        let p = profile(0, 1.0, |t| (-t).exp());
        let mut running = 0.0f64;
        for order in 0..=8 {
            let v = seminorm(std::slice::from_ref(&p), order, 0).unwrap().value;
            let exact = (1.0 / factorial(order)).powf(1.0 / (order + 1) as f64);
            let tol = if order <= 6 { 1e-6 } else { 1e-3 };
            assert!(
                (v - exact).abs() < tol * exact,
                "N = {order}: {v} vs {exact}"
            );
            running = running.max(v);
            assert!(running <= 1.0 + 1e-9);
        }
        assert!((running - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tail_excludes_head_modes() {
        let head = profile(0, 1.0, |t| 50.0 * t.powi(4));
        let tail = profile(4, 1.0, |t| t.powi(3));
        let est = seminorm(&[head, tail], 3, 2).unwrap();
        assert_eq!(est.per_mode.len(), 2);
        assert!((est.value - 1.0).abs() < 1e-9, "{}", est.value);
        assert!(est.per_mode[0].1 > 1.0);
    }

    #[test]
    fn rejects_unreliable_orders() {
        let p = profile(0, 1.0, f64::exp);
        assert!(matches!(
            seminorm(std::slice::from_ref(&p), 17, 0),
            Err(Error::IllConditionedDerivative { .. })
        ));
        assert!(seminorm(&[p], 2, 3).is_err());
        assert!(seminorm(&[], 2, 0).is_err());
    }
}
