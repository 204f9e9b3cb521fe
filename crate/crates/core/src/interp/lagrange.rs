use crate::error::{Error, Result};
use crate::harmonics::ModeIndex;

/// Largest supported interpolation order `N`.
pub const MAX_ORDER: usize = 16;

/// Knots closer than this fraction of `max |x|` count as coincident.
const COINCIDENCE: f64 = 1e-14;

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::OrderCap {
            order,
            cap: MAX_ORDER,
        });
    }
    Ok(())
}

/// Barycentric weights `w_j = 1 / Π_{i≠j} (x_j - x_i)`.
pub fn barycentric_weights(knots_t: &[f64]) -> Result<Vec<f64>> {
    if let Some(x) = knots_t.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite knot {x}")));
    }
    let scale = knots_t.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..knots_t.len() {
        for j in i + 1..knots_t.len() {
            if (knots_t[i] - knots_t[j]).abs() <= COINCIDENCE * scale {
                return Err(Error::DegenerateKnots {
                    i,
                    j,
                    value: knots_t[i],
                });
            }
        }
    }
    Ok((0..knots_t.len())
        .map(|j| {
            let prod: f64 = (0..knots_t.len())
                .filter(|&i| i != j)
                .map(|i| knots_t[j] - knots_t[i])
                .product();
            1.0 / prod
        })
        .collect())
}

fn basis_with_weights(knots_t: &[f64], weights: &[f64], t: f64) -> Vec<f64> {
    if let Some(i) = knots_t.iter().position(|&x| x == t) {
        let mut e = vec![0.0; knots_t.len()];
        e[i] = 1.0;
        return e;
    }
    let terms: Vec<f64> = knots_t
        .iter()
        .zip(weights)
        .map(|(x, w)| w / (t - x))
        .collect();
    let denom: f64 = terms.iter().sum();
    terms.iter().map(|v| v / denom).collect()
}

/// Lagrange fundamental functions `ω_j(t)` for the knots `x_0..x_{N-1}`,
/// evaluated in the second barycentric form.
pub fn lagrange_basis(knots_t: &[f64], t: f64) -> Result<Vec<f64>> {
    check_order(knots_t.len())?;
    let weights = barycentric_weights(knots_t)?;
    Ok(basis_with_weights(knots_t, &weights, t))
}

/// Monomial coefficients (ascending powers of `t`) of the interpolant
/// through `(x_j, y_j)`, via Newton divided differences.
fn monomial_from_values(knots_t: &[f64], values: &[f64]) -> Vec<f64> {
    let n = knots_t.len();
    let mut dd = values.to_vec();
    for level in 1..n {
        for j in (level..n).rev() {
            dd[j] = (dd[j] - dd[j - 1]) / (knots_t[j] - knots_t[j - level]);
        }
    }
    let mut poly = vec![0.0; n];
    poly[0] = dd[n - 1];
    for (len, j) in (1..).zip((0..n - 1).rev()) {
        // poly <- poly * (t - x_j) + dd[j]
        for m in (0..len).rev() {
            poly[m + 1] += poly[m];
            poly[m] *= -knots_t[j];
        }
        poly[0] += dd[j];
    }
    poly
}

/// The degree `≤ N-1` polynomial `h_{k,ℓ}(t)` of one mode, with its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePolynomial {
    mode: ModeIndex,
    knots_t: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
    monomial: Vec<f64>,
}

impl ModePolynomial {
    /// Interpolates `values[j]` at `knots_t[j]`.
    pub fn new(mode: ModeIndex, knots_t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_order(knots_t.len())?;
        if values.len() != knots_t.len() {
            return Err(Error::InconsistentInput(format!(
                "{} knots vs {} values",
                knots_t.len(),
                values.len()
            )));
        }
        if let Some((j, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Magnitude { mode, j, value });
        }
        let weights = barycentric_weights(&knots_t)?;
        let monomial = monomial_from_values(&knots_t, &values);
        Ok(Self {
            mode,
            knots_t,
            values,
            weights,
            monomial,
        })
    }

    /// Rebuilds a stored polynomial, keeping the given monomial coefficients.
    pub(crate) fn from_parts(
        mode: ModeIndex,
        knots_t: Vec<f64>,
        values: Vec<f64>,
        monomial: Vec<f64>,
    ) -> Result<Self> {
        let mut p = Self::new(mode, knots_t, values)?;
        if monomial.len() != p.monomial.len() {
            return Err(Error::InconsistentInput(format!(
                "mode {mode}: {} monomial coefficients for order {}",
                monomial.len(),
                p.order()
            )));
        }
        p.monomial = monomial;
        Ok(p)
    }

    pub fn mode(&self) -> ModeIndex {
        self.mode
    }

    pub fn order(&self) -> usize {
        self.knots_t.len()
    }

    pub fn knots_t(&self) -> &[f64] {
        &self.knots_t
    }

    pub fn values_at_knots(&self) -> &[f64] {
        &self.values
    }

    pub fn barycentric_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Coefficients of `1, t, t², ...`.
    pub fn monomial_coeffs(&self) -> &[f64] {
        &self.monomial
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Barycentric evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        basis_with_weights(&self.knots_t, &self.weights, t)
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Horner evaluation of the monomial form.
    pub fn eval_monomial(&self, t: f64) -> f64 {
        self.monomial.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// Fits `h_{k,ℓ}` to sphere data: interpolates `φ^j / r_j^k` at `x_j = r_j²`.
pub fn fit_mode_polynomial(
    mode: ModeIndex,
    knot_radii: &[f64],
    data: &[f64],
) -> Result<ModePolynomial> {
    if knot_radii.len() != data.len() {
        return Err(Error::InconsistentInput(format!(
            "{} radii vs {} data values",
            knot_radii.len(),
            data.len()
        )));
    }
    check_order(knot_radii.len())?;
    let mut values = Vec::with_capacity(data.len());
    for (j, (&r, &phi)) in knot_radii.iter().zip(data).enumerate() {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "knot radius {r} is not a nonnegative number"
            )));
        }
        if r == 0.0 && mode.k >= 1 {
            return Err(Error::ZeroRadiusPositiveDegree { k: mode.k });
        }
        let mut v = phi / r.powi(mode.k as i32);
        if !v.is_finite() && phi != 0.0 && phi.is_finite() {
            // r^k under- or overflowed on its own; combine in log space.
            v = phi.signum() * (phi.abs().ln() - mode.k as f64 * r.ln()).exp();
        }
        if !v.is_finite() {
            return Err(Error::Magnitude { mode, j, value: v });
        }
        values.push(v);
    }
    ModePolynomial::new(mode, knot_radii.iter().map(|r| r * r).collect(), values)
}
