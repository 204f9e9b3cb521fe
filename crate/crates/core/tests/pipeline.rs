use std::collections::BTreeMap;

use polyharm::harmonics::{build_basis, build_quadrature, ModeLayout, SphereTransform};
use polyharm::interp::{
    interpolate_spheres, l2_error_on_sphere, radial_laplacian_power, PolyharmonicInterpolant,
};
use polyharm::radial::{sphere_traces, AnalyticFunction, BallFunction, TRACE_NOISE_FLOOR};
use polyharm::ModeIndex;
use rand::{Rng, SeedableRng};

fn transform(n: usize, k_max: usize, exactness: usize) -> SphereTransform {
    SphereTransform::new(
        build_basis(n, k_max).unwrap(),
        build_quadrature(n, exactness).unwrap(),
    )
    .unwrap()
}

/// Square roots of Chebyshev-Lobatto points in `t` on `[lo², 1]`.
fn knot_radii(order: usize, lo: f64) -> Vec<f64> {
    if order == 1 {
        return vec![1.0];
    }
    (0..order)
        .map(|j| {
            let x = -(std::f64::consts::PI * j as f64 / (order - 1) as f64).cos();
            (lo * lo + (1.0 - lo * lo) * (x + 1.0) / 2.0).sqrt()
        })
        .collect()
}

#[test]
fn finite_mode_functions_are_reproduced() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..25 {
        let n = rng.random_range(2..=3);
        let k_max = rng.random_range(0..=6);
        let order = rng.random_range(1..=4);
        let mut profiles = BTreeMap::new();
        for m in ModeLayout::new(n, k_max).unwrap().modes() {
            profiles.insert(
                m,
                (0..order)
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect::<Vec<f64>>(),
            );
        }
        let f = AnalyticFunction::finite_mode(n, 1.0, profiles.clone()).unwrap();
        let radii = knot_radii(order, 0.7);
        let traces = sphere_traces(&f, &radii, &transform(n, k_max, 2 * k_max)).unwrap();
        let h = interpolate_spheres(1.0, &traces, &radii, k_max).unwrap();
        let scale = profiles
            .values()
            .flatten()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        for p in h.modes() {
            for (a, b) in p.monomial_coeffs().iter().zip(&profiles[&p.mode()]) {
                assert!(
                    (a - b).abs() < 1e-10 * scale,
                    "mode {}: {a} vs {b}",
                    p.mode()
                );
            }
        }
        assert!(radial_laplacian_power(&h, order).certificate() < 1e-9);
    }
}

#[test]
fn gaussian_interpolation_conditions_and_parseval() {
    let (k_max, exactness) = (20, 60);
    let f = AnalyticFunction::gaussian(3, 1.0, 1.0, vec![0.3, -0.2, 0.25]).unwrap();
    let t = transform(3, k_max, exactness);
    let radii = [0.4, 0.7, 1.0];
    let traces: Vec<_> = sphere_traces(&f, &radii, &t)
        .unwrap()
        .iter()
        .map(|tr| tr.chopped(TRACE_NOISE_FLOOR))
        .collect();
    let h = interpolate_spheres(1.0, &traces, &radii, k_max).unwrap();
    let mut worst = 0.0f64;
    for &r in &radii {
        let values = f.sphere_values(r, t.rule()).unwrap();
        for (i, theta) in t.rule().nodes().enumerate() {
            worst = worst.max((h.evaluate(r, theta).unwrap() - values[i]).abs());
        }
    }
    assert!(worst < 1e-8, "residual {worst}");
    let mid = l2_error_on_sphere(&f, &h, 0.55, &t).unwrap();
    assert!((mid.direct - mid.parseval).abs() < 1e-8, "{mid:?}");
    assert!(mid.direct > 0.0);
}

#[test]
fn evaluation_matches_term_by_term_oracle() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    let k_max = 5;
    let mut profiles = BTreeMap::new();
    for m in ModeLayout::new(3, k_max).unwrap().modes() {
        profiles.insert(
            m,
            vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        );
    }
    let f = AnalyticFunction::finite_mode(3, 1.0, profiles.clone()).unwrap();
    let radii = [0.8, 1.0];
    let h = interpolate_spheres(
        1.0,
        &sphere_traces(&f, &radii, &transform(3, k_max, 10)).unwrap(),
        &radii,
        k_max,
    )
    .unwrap();
    let basis = build_basis(3, k_max).unwrap();
    for _ in 0..20 {
        let r: f64 = rng.random_range(0.0..1.0);
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let theta = [v[0] / norm, v[1] / norm, v[2] / norm];
        // Descending-order summation from the input profiles.
        let mut oracle = 0.0;
        for (m, c) in profiles.iter().rev() {
            let tt = r * r;
            oracle += (c[0] + c[1] * tt) * r.powi(m.k as i32) * basis.eval(*m, &theta).unwrap();
        }
        assert!(
            (h.evaluate(r, &theta).unwrap() - oracle).abs() < 1e-12 * (1.0 + oracle.abs()) * 10.0
        );
    }
}

#[test]
fn construction_and_evaluation_are_deterministic() {
    let f = AnalyticFunction::exp_linear(3, 1.0, vec![0.4, 0.1, -0.3]).unwrap();
    let t = transform(3, 10, 20);
    let radii = [0.5, 0.75, 1.0];
    let build =
        || interpolate_spheres(1.0, &sphere_traces(&f, &radii, &t).unwrap(), &radii, 10).unwrap();
    let a = build();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let b: PolyharmonicInterpolant = pool.install(build);
    assert_eq!(a.to_json(), b.to_json());
    let theta = [0.0, 0.6, 0.8];
    assert_eq!(
        a.evaluate(0.33, &theta).unwrap().to_bits(),
        b.evaluate(0.33, &theta).unwrap().to_bits()
    );
    let ea = l2_error_on_sphere(&f, &a, 0.6, &t).unwrap();
    let eb = pool.install(|| l2_error_on_sphere(&f, &b, 0.6, &t).unwrap());
    assert_eq!(ea, eb);
    assert!(a.mode(ModeIndex::new(10, 21)).is_some());
}
