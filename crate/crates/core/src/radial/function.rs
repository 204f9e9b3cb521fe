use std::collections::BTreeMap;
use std::io::Read;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::harmonics::{HarmonicBasis, ModeIndex, QuadratureRule};

/// Slack allowed when comparing a radius against the ball radius.
const RADIUS_SLACK: f64 = 1e-12;

/// A function on the closed ball `|x| ≤ R` that can be sampled on spheres.
pub trait BallFunction: Send + Sync {
    fn dimension(&self) -> usize;

    fn radius(&self) -> f64;

    /// Values `f(r θ_i)` at every node of `rule`, in node order.
    fn sphere_values(&self, r: f64, rule: &QuadratureRule) -> Result<Vec<f64>>;
}

pub(crate) fn check_radius(r: f64, radius: f64) -> Result<()> {
    if !(r >= 0.0) || r > radius * (1.0 + RADIUS_SLACK) {
        return Err(Error::OutOfDomain { r, radius });
    }
    Ok(())
}

type PointFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A ball function given by a point evaluator.
#[derive(Clone)]
pub struct AnalyticFunction {
    n: usize,
    radius: f64,
    eval: Arc<PointFn>,
}

impl std::fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("n", &self.n)
            .field("radius", &self.radius)
            .finish()
    }
}

impl AnalyticFunction {
    pub fn new<F>(n: usize, radius: f64, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if n < 2 {
            return Err(Error::NoSphere(n));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            n,
            radius,
            eval: Arc::new(eval),
        })
    }

    pub fn constant(n: usize, radius: f64, value: f64) -> Result<Self> {
        Self::new(n, radius, move |_| value)
    }

    /// `exp(-a |x - c|²)`.
    pub fn gaussian(n: usize, radius: f64, a: f64, center: Vec<f64>) -> Result<Self> {
        if center.len() != n {
            return Err(Error::InvalidArgument(format!(
                "center has {} components, expected {n}",
                center.len()
            )));
        }
        Self::new(n, radius, move |x| {
            let d2: f64 = x
                .iter()
                .zip(&center)
                .map(|(xi, ci)| (xi - ci) * (xi - ci))
                .sum();
            (-a * d2).exp()
        })
    }

    /// `exp(b · x)`.
    pub fn exp_linear(n: usize, radius: f64, direction: Vec<f64>) -> Result<Self> {
        if direction.len() != n {
            return Err(Error::InvalidArgument(format!(
                "direction has {} components, expected {n}",
                direction.len()
            )));
        }
        Self::new(n, radius, move |x| {
            x.iter()
                .zip(&direction)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .exp()
        })
    }

    /// `Σ g_{k,ℓ}(r²) r^k Y_{k,ℓ}(θ)` for polynomial profiles `g` given by
    /// monomial coefficients in `t = r²`.
    pub fn finite_mode(
        n: usize,
        radius: f64,
        profiles: BTreeMap<ModeIndex, Vec<f64>>,
    ) -> Result<Self> {
        let k_max = profiles.keys().map(|m| m.k).max().unwrap_or(0);
        let basis = HarmonicBasis::uncapped(n, k_max)?;
        let mut terms = Vec::with_capacity(profiles.len());
        for (mode, coeffs) in profiles {
            mode.validate(n)?;
            terms.push((
                mode.k,
                basis.layout().index_of(mode).expect("validated mode"),
                coeffs,
            ));
        }
        Self::new(n, radius, move |x| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            let mut theta = vec![0.0; x.len()];
            if r > 0.0 {
                theta.iter_mut().zip(x).for_each(|(t, xi)| *t = xi / r);
            } else {
                theta[0] = 1.0;
            }
            let y = basis.eval_all(&theta);
            let t = r * r;
            terms
                .iter()
                .map(|(k, idx, c)| {
                    let g = c.iter().rev().fold(0.0, |acc, ci| acc * t + ci);
                    g * r.powi(*k as i32) * y[*idx]
                })
                .sum()
        })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }
}

impl BallFunction for AnalyticFunction {
    fn dimension(&self) -> usize {
        self.n
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn sphere_values(&self, r: f64, rule: &QuadratureRule) -> Result<Vec<f64>> {
        check_radius(r, self.radius)?;
        if rule.dimension() != self.n {
            return Err(Error::InconsistentInput(format!(
                "rule dimension {} differs from function dimension {}",
                rule.dimension(),
                self.n
            )));
        }
        Ok((0..rule.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; self.n],
                |x, i| {
                    x.iter_mut()
                        .zip(rule.node(i))
                        .for_each(|(xi, ti)| *xi = r * ti);
                    self.value(x)
                },
            )
            .collect())
    }
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    r: f64,
    node_index: usize,
    f_value: f64,
}

/// Gridded samples `f(r θ_i)` on a set of spheres, with `θ_i` the nodes of a
/// fixed quadrature rule.
///
/// CSV input has header `r,node_index,f_value`; every listed radius must
/// carry exactly one value for each node index `0..rule.len()`.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    n: usize,
    radius: f64,
    nodes: usize,
    spheres: Vec<(f64, Vec<f64>)>,
}

impl SampledFunction {
    pub fn from_csv<R: Read>(reader: R, rule: &QuadratureRule, radius: f64) -> Result<Self> {
        let mut grouped: BTreeMap<u64, (f64, Vec<Option<f64>>)> = BTreeMap::new();
        let mut csv = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        for (line, row) in csv.deserialize::<SampleRow>().enumerate() {
            let row = row.map_err(|e| Error::Parse(format!("sample row {}: {e}", line + 2)))?;
            check_radius(row.r, radius)?;
            if row.node_index >= rule.len() {
                return Err(Error::Parse(format!(
                    "sample row {}: node index {} outside 0..{}",
                    line + 2,
                    row.node_index,
                    rule.len()
                )));
            }
            let entry = grouped
                .entry(row.r.to_bits())
                .or_insert_with(|| (row.r, vec![None; rule.len()]));
            if entry.1[row.node_index].replace(row.f_value).is_some() {
                return Err(Error::Parse(format!(
                    "sample row {}: duplicate node {} at r = {}",
                    line + 2,
                    row.node_index,
                    row.r
                )));
            }
        }
        let mut spheres = Vec::with_capacity(grouped.len());
        for (_, (r, values)) in grouped {
            let values: Option<Vec<f64>> = values.into_iter().collect();
            let values = values
                .ok_or_else(|| Error::Parse(format!("sphere r = {r} is missing node samples")))?;
            spheres.push((r, values));
        }
        spheres.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            n: rule.dimension(),
            radius,
            nodes: rule.len(),
            spheres,
        })
    }

    /// Radii that carry samples, ascending.
    pub fn radii(&self) -> Vec<f64> {
        self.spheres.iter().map(|s| s.0).collect()
    }
}

impl BallFunction for SampledFunction {
    fn dimension(&self) -> usize {
        self.n
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn sphere_values(&self, r: f64, rule: &QuadratureRule) -> Result<Vec<f64>> {
        check_radius(r, self.radius)?;
        if rule.len() != self.nodes || rule.dimension() != self.n {
            return Err(Error::InconsistentInput(
                "quadrature rule differs from the sampled node set".into(),
            ));
        }
        self.spheres
            .iter()
            .find(|(ri, _)| (ri - r).abs() <= RADIUS_SLACK * self.radius)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::InconsistentInput(format!("no samples on the sphere r = {r}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::build_quadrature;

    #[test]
    fn sampled_function_reads_csv() {
        let rule = build_quadrature(2, 2).unwrap();
        let mut text = String::from("r,node_index,f_value\n");
        for r in [0.5, 1.0] {
            for i in 0..rule.len() {
                text.push_str(&format!("{r},{i},{}\n", r * i as f64));
            }
        }
        let f = SampledFunction::from_csv(text.as_bytes(), &rule, 1.0).unwrap();
        assert_eq!(f.radii(), vec![0.5, 1.0]);
        assert_eq!(
            f.sphere_values(0.5, &rule).unwrap(),
            vec![0.0, 0.5, 1.0, 1.5]
        );
        assert!(f.sphere_values(0.75, &rule).is_err());
        assert!(matches!(
            f.sphere_values(1.5, &rule),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn sampled_function_rejects_incomplete_spheres() {
        let rule = build_quadrature(2, 2).unwrap();
        let text = "r,node_index,f_value\n1.0,0,1\n1.0,1,1\n";
        assert!(SampledFunction::from_csv(text.as_bytes(), &rule, 1.0).is_err());
        let dup = "r,node_index,f_value\n1.0,0,1\n1.0,0,1\n1.0,1,1\n1.0,2,1\n1.0,3,1\n";
        assert!(SampledFunction::from_csv(dup.as_bytes(), &rule, 1.0).is_err());
    }

    #[test]
    fn analytic_function_checks_domain() {
        let f = AnalyticFunction::constant(3, 1.0, 2.0).unwrap();
        let rule = build_quadrature(3, 4).unwrap();
        assert!(f
            .sphere_values(1.0, &rule)
            .unwrap()
            .iter()
            .all(|&v| v == 2.0));
        assert_eq!(
            f.sphere_values(1.01, &rule),
            Err(Error::OutOfDomain {
                r: 1.01,
                radius: 1.0
            })
        );
        assert!(AnalyticFunction::constant(1, 1.0, 0.0).is_err());
        assert!(AnalyticFunction::constant(3, -1.0, 0.0).is_err());
    }

    #[test]
    fn finite_mode_function_at_origin() {
        let mut profiles = BTreeMap::new();
        profiles.insert(ModeIndex::new(0, 1), vec![2.0, 1.0]);
        profiles.insert(ModeIndex::new(1, 2), vec![5.0]);
        let f = AnalyticFunction::finite_mode(3, 1.0, profiles).unwrap();
        assert_eq!(f.value(&[0.0, 0.0, 0.0]), 2.0);
        // 2 + t + 5 r √3 x/r at x = (0.5, 0, 0).
        let expect = 2.0 + 0.25 + 5.0 * 3f64.sqrt() * 0.5;
        assert!((f.value(&[0.5, 0.0, 0.0]) - expect).abs() < 1e-14);
    }
}
