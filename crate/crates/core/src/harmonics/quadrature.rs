use std::f64::consts::PI;

use super::HarmonicBasis;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Nodes and weights on S^{n-1} realizing `(1/ω_{n-1}) ∫ dθ`, so the weights
/// sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    n: usize,
    /// Flat `len * n` storage of unit vectors.
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exactness: usize,
}

impl QuadratureRule {
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Highest total harmonic degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        self.exactness
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.n..(i + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.n)
    }
}

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; points];
    let mut weights = vec![0.0; points];
    let nf = points as f64;
    for i in 0..points.div_ceil(2) {
        // Newton from the Tricomi-type initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(points, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(points, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[points - 1 - i] = x;
        nodes[i] = -x;
        weights[points - 1 - i] = w;
        weights[i] = w;
    }
    if points % 2 == 1 {
        nodes[points / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Builds a rule integrating every product of harmonics with total degree
/// `≤ exactness_degree` exactly.
///
/// n = 2 uses `exactness + 2` equispaced angles; n = 3 is the product of
/// Gauss-Legendre in `cos(polar)` with `exactness + 2` equispaced azimuths.
pub fn build_quadrature(n: usize, exactness_degree: usize) -> Result<QuadratureRule> {
    match n {
        0 | 1 => Err(Error::NoSphere(n)),
        2 => {
            let m = exactness_degree + 2;
            let mut nodes = Vec::with_capacity(2 * m);
            for i in 0..m {
                let (s, c) = (2.0 * PI * i as f64 / m as f64).sin_cos();
                nodes.extend_from_slice(&[c, s]);
            }
            Ok(QuadratureRule {
                n,
                nodes,
                weights: vec![1.0 / m as f64; m],
                exactness: exactness_degree,
            })
        }
        3 => {
            let polar = exactness_degree / 2 + 1;
            let azimuth = exactness_degree + 2;
            let (zs, gw) = gauss_legendre(polar);
            let total = compensated_sum(gw.iter().copied());
            let mut nodes = Vec::with_capacity(3 * polar * azimuth);
            let mut weights = Vec::with_capacity(polar * azimuth);
            for (&z, &w) in zs.iter().zip(&gw) {
                let s = (1.0 - z * z).sqrt();
                for a in 0..azimuth {
                    let (sp, cp) = (2.0 * PI * a as f64 / azimuth as f64).sin_cos();
                    nodes.extend_from_slice(&[s * cp, s * sp, z]);
                    weights.push(w / total / azimuth as f64);
                }
            }
            Ok(QuadratureRule {
                n,
                nodes,
                weights,
                exactness: exactness_degree,
            })
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// `Σ w_i u(θ_i) v(θ_i)`, summed in node order.
pub fn inner_product<U, V>(u: U, v: V, rule: &QuadratureRule) -> f64
where
    U: Fn(&[f64]) -> f64,
    V: Fn(&[f64]) -> f64,
{
    compensated_sum(
        rule.nodes()
            .zip(rule.weights())
            .map(|(theta, w)| w * u(theta) * v(theta)),
    )
}

/// A basis tabulated on a quadrature rule: forward (analysis) and inverse
/// (synthesis) spherical-harmonic transforms.
#[derive(Debug, Clone)]
pub struct SphereTransform {
    basis: HarmonicBasis,
    rule: QuadratureRule,
    /// Row-major `nodes × modes`.
    table: Vec<f64>,
}

impl SphereTransform {
    /// Requires the rule to integrate products up to degree `2·k_max`.
    pub fn new(basis: HarmonicBasis, rule: QuadratureRule) -> Result<Self> {
        if basis.dimension() != rule.dimension() {
            return Err(Error::InconsistentInput(format!(
                "basis dimension {} differs from quadrature dimension {}",
                basis.dimension(),
                rule.dimension()
            )));
        }
        if rule.exactness_degree() < 2 * basis.k_max() {
            return Err(Error::InconsistentInput(format!(
                "quadrature exactness {} below 2*k_max = {}",
                rule.exactness_degree(),
                2 * basis.k_max()
            )));
        }
        let modes = basis.len();
        let mut table = vec![0.0; rule.len() * modes];
        for (i, theta) in rule.nodes().enumerate() {
            basis.eval_all_into(theta, &mut table[i * modes..(i + 1) * modes]);
        }
        Ok(Self { basis, rule, table })
    }

    pub fn basis(&self) -> &HarmonicBasis {
        &self.basis
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Values of every harmonic at node `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.basis.len();
        &self.table[i * m..(i + 1) * m]
    }

    /// Coefficients `⟨v, Y_{k,ℓ}⟩` of node values `v`.
    pub fn analyze(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.rule.len(), "one value per node required");
        let mut acc = vec![CompensatedSum::new(); self.basis.len()];
        for (i, (&v, &w)) in values.iter().zip(self.rule.weights()).enumerate() {
            let wv = w * v;
            for (c, y) in acc.iter_mut().zip(self.row(i)) {
                c.add(wv * y);
            }
        }
        acc.iter().map(CompensatedSum::value).collect()
    }

    /// Node values of `Σ c_{k,ℓ} Y_{k,ℓ}`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(
            coeffs.len(),
            self.basis.len(),
            "one coefficient per mode required"
        );
        (0..self.rule.len())
            .map(|i| self.row(i).iter().zip(coeffs).map(|(y, c)| y * c).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::build_basis;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for points in [1, 2, 5, 16, 33, 120] {
            let (x, w) = gauss_legendre(points);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for deg in 0..2 * points {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert_abs_diff_eq!(got, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn circle_rule_example() {
        let rule = build_quadrature(2, 2).unwrap();
        assert_eq!(rule.len(), 4);
        assert!(rule.weights().iter().all(|&w| w == 0.25));
        let v = inner_product(|t| t[0], |t| t[0], &rule);
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rules_are_normalized_unit_vectors() {
        for n in [2, 3] {
            for exactness in [0, 1, 2, 7, 20, 40, 128] {
                let rule = build_quadrature(n, exactness).unwrap();
                let sum = compensated_sum(rule.weights().iter().copied());
                assert!((sum - 1.0).abs() < 1e-14, "n={n} e={exactness} sum={sum}");
                assert!(rule.weights().iter().all(|&w| w > 0.0));
                for theta in rule.nodes() {
                    let norm = theta.iter().map(|c| c * c).sum::<f64>().sqrt();
                    assert!((norm - 1.0).abs() < 1e-14);
                }
                assert_abs_diff_eq!(inner_product(|_| 1.0, |_| 1.0, &rule), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn gram_matrix_identity_up_to_exactness() {
        for (n, k_max) in [(2, 15), (3, 12)] {
            let basis = build_basis(n, k_max).unwrap();
            let rule = build_quadrature(n, 2 * k_max).unwrap();
            let transform = SphereTransform::new(basis.clone(), rule).unwrap();
            for (j, _) in basis.layout().modes().enumerate() {
                let column: Vec<f64> = (0..transform.rule().len())
                    .map(|i| transform.row(i)[j])
                    .collect();
                let gram_row = transform.analyze(&column);
                for (i, g) in gram_row.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((g - expect).abs() < 1e-12, "n={n} ({i},{j}) -> {g}");
                }
            }
        }
    }

    #[test]
    fn transform_requires_enough_exactness() {
        let basis = build_basis(3, 6).unwrap();
        let rule = build_quadrature(3, 11).unwrap();
        assert!(SphereTransform::new(basis, rule).is_err());
    }

    #[test]
    fn analyze_inverts_synthesize() {
        let basis = build_basis(3, 7).unwrap();
        let rule = build_quadrature(3, 14).unwrap();
        let t = SphereTransform::new(basis, rule).unwrap();
        let coeffs: Vec<f64> = (0..t.basis().len())
            .map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0)
            .collect();
        let back = t.analyze(&t.synthesize(&coeffs));
        for (a, b) in coeffs.iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }
}
