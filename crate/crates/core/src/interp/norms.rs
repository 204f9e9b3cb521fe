use rayon::prelude::*;

use super::interpolant::PolyharmonicInterpolant;
use crate::error::{Error, Result};
use crate::harmonics::{gauss_legendre, SphereTransform};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::radial::BallFunction;

/// `‖f(r·) - h(r·)‖` in `L²(S^{n-1})` with the normalized measure, computed
/// twice: from nodal values and from harmonic coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereError {
    pub radius: f64,
    /// `(Σ_i w_i |f(rθ_i) - h(rθ_i)|²)^{1/2}`.
    pub direct: f64,
    /// `(Σ_{k,ℓ} |f̃_{k,ℓ}(r) - r^k h_{k,ℓ}(r²)|²)^{1/2}` over the transform's modes.
    pub parseval: f64,
}

pub fn l2_error_on_sphere<F: BallFunction + ?Sized>(
    f: &F,
    h: &PolyharmonicInterpolant,
    r: f64,
    transform: &SphereTransform,
) -> Result<SphereError> {
    let basis = transform.basis();
    if f.dimension() != h.dimension() || basis.dimension() != h.dimension() {
        return Err(Error::InconsistentInput(
            "function, interpolant and transform dimensions differ".into(),
        ));
    }
    if basis.k_max() < h.k_max() {
        return Err(Error::InconsistentInput(format!(
            "transform degree {} is below the interpolant's k_max = {}",
            basis.k_max(),
            h.k_max()
        )));
    }
    let mut h_coeffs = h.sphere_coefficients(r)?;
    h_coeffs.resize(basis.len(), 0.0);
    let f_values = f.sphere_values(r, transform.rule())?;
    let h_values = transform.synthesize(&h_coeffs);
    let direct = compensated_sum(
        transform
            .rule()
            .weights()
            .iter()
            .zip(f_values.iter().zip(&h_values))
            .map(|(w, (a, b))| w * (a - b) * (a - b)),
    );
    let f_coeffs = transform.analyze(&f_values);
    let parseval = compensated_sum(
        f_coeffs
            .iter()
            .zip(&h_coeffs)
            .map(|(a, b)| (a - b) * (a - b)),
    );
    Ok(SphereError {
        radius: r,
        direct: direct.max(0.0).sqrt(),
        parseval: parseval.sqrt(),
    })
}

/// The series `Σ_{k,ℓ} ∫₀^R |r^k h_{k,ℓ}(r²)|² w(r) dr` with `w = 1`, or
/// `w = r^{n-1}` when the Jacobian is requested.
#[derive(Debug, Clone, PartialEq)]
pub struct BallNorm {
    /// Sum of all per-mode integrals (the squared norm).
    pub total: f64,
    /// Per-mode integrals in layout order.
    pub per_mode: Vec<f64>,
    /// `S_K - S_{K-1}`: the sum of the degree-`K` integrals.
    pub degree_totals: Vec<f64>,
    /// `S_K` for `K = 0..=k_max`.
    pub partial_sums: Vec<f64>,
    pub jacobian: bool,
}

impl BallNorm {
    pub fn norm(&self) -> f64 {
        self.total.sqrt()
    }
}

pub fn l2_norm_ball(h: &PolyharmonicInterpolant, jacobian: bool) -> BallNorm {
    let radius = h.radius();
    let layout = h.layout();
    let extra = if jacobian { h.dimension() - 1 } else { 0 };
    let per_degree: Vec<Vec<f64>> = (0..=h.k_max())
        .into_par_iter()
        .map(|k| {
            // Integrand degree in r: 2k + 4(N-1) + extra.
            let degree = 2 * k + 4 * (h.order() - 1) + extra;
            let (nodes, weights) = gauss_legendre(degree / 2 + 1);
            let half = 0.5 * radius;
            let samples: Vec<(f64, f64)> = nodes
                .iter()
                .zip(&weights)
                .map(|(&x, &w)| {
                    let r = half * (x + 1.0);
                    (r, w * half * r.powi((2 * k + extra) as i32))
                })
                .collect();
            h.modes()[layout.degree_range(k)]
                .iter()
                .map(|p| {
                    if p.is_zero() {
                        return 0.0;
                    }
                    compensated_sum(samples.iter().map(|&(r, w)| {
                        let v = p.eval(r * r);
                        w * v * v
                    }))
                })
                .collect()
        })
        .collect();
    let mut acc = CompensatedSum::new();
    let mut partial_sums = Vec::with_capacity(per_degree.len());
    let mut degree_totals = Vec::with_capacity(per_degree.len());
    for ints in &per_degree {
        ints.iter().for_each(|&v| acc.add(v));
        degree_totals.push(compensated_sum(ints.iter().copied()));
        partial_sums.push(acc.value());
    }
    BallNorm {
        total: acc.value(),
        per_mode: per_degree.into_iter().flatten().collect(),
        degree_totals,
        partial_sums,
        jacobian,
    }
}
