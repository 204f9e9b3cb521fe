use polyharm::harmonics::{build_basis, build_quadrature, mode_dimension, SphereTransform};
use polyharm::interp::{lagrange_basis, ModePolynomial};
use polyharm::radial::{estimate_decay_from_maxima, DecayOptions};
use polyharm::ModeIndex;
use proptest::prelude::*;

fn distinct_knots(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..4.0, 1..=max_len).prop_filter("distinct knots", |x| {
        x.iter()
            .enumerate()
            .all(|(i, a)| x[i + 1..].iter().all(|b| (a - b).abs() > 1e-3))
    })
}

/// One knot per cell of an equal partition of `[0, 4]`.
fn stratified_knots(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    (1..=max_len).prop_flat_map(|n| {
        prop::collection::vec(0.0f64..1.0, n).prop_map(move |u| {
            u.iter()
                .enumerate()
                .map(|(j, v)| 4.0 * (j as f64 + v) / n as f64)
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn partition_of_unity(knots in stratified_knots(8), t in 0.0f64..4.0) {
        let w = lagrange_basis(&knots, t).unwrap();
        let sum: f64 = w.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12, "sum = {sum}");
    }

    /// For arbitrary distinct knots the defect is rounding relative to the
    /// Lebesgue function `Σ |ω_j(t)|`.
    #[test]
    fn partition_of_unity_defect_is_rounding(knots in distinct_knots(8), t in -1.0f64..5.0) {
        let w = lagrange_basis(&knots, t).unwrap();
        let sum: f64 = w.iter().sum();
        let lebesgue: f64 = w.iter().map(|v| v.abs()).sum();
        prop_assert!((sum - 1.0).abs() <= 4.0 * knots.len() as f64 * f64::EPSILON * lebesgue);
    }

    #[test]
    fn barycentric_and_monomial_agree(
        knots in distinct_knots(6),
        values in prop::collection::vec(-2.0f64..2.0, 6),
        t in 0.0f64..4.0,
    ) {
        let values = values[..knots.len()].to_vec();
        let p = ModePolynomial::new(ModeIndex::new(0, 1), knots, values).unwrap();
        let scale = 1.0 + p.monomial_coeffs().iter().map(|c| c.abs() * 4f64.powi(3)).fold(0.0, f64::max);
        prop_assert!((p.eval(t) - p.eval_monomial(t)).abs() < 1e-9 * scale);
    }

    #[test]
    fn decay_fit_exact_on_log_linear(k_const in 0.1f64..10.0, eta in 0.05f64..1.0) {
        let maxima: Vec<f64> = (0..=25).map(|k| k_const * (-eta * k as f64).exp()).collect();
        let est = estimate_decay_from_maxima(&maxima, &DecayOptions::default()).unwrap();
        prop_assert!(est.residual < 1e-12);
        prop_assert!((est.eta - eta).abs() < 1e-9);
    }
}

#[test]
fn dimension_count_bound() {
    for n in [2usize, 3] {
        for k in 1..=200 {
            assert!(mode_dimension(n, k).unwrap() as f64 <= 3.0 * (k as f64).powi(n as i32 - 2));
        }
    }
}

#[test]
fn gram_matrix_for_degree_twenty() {
    let k_max = 20;
    let t = SphereTransform::new(
        build_basis(3, k_max).unwrap(),
        build_quadrature(3, 2 * k_max).unwrap(),
    )
    .unwrap();
    let m = t.basis().len();
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in a..m {
            let g: f64 = (0..t.rule().len())
                .map(|i| t.rule().weights()[i] * t.row(i)[a] * t.row(i)[b])
                .sum();
            worst = worst.max((g - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    assert!(worst < 1e-10, "Gram deviation {worst}");
}
