//! Text serialization of interpolants.
//!
//! ```text
//! {"format":"polyharm-interpolant","version":1,"n":3,"order":2,"k_max":1,"radius":1.0,
//!  "knots":{"variant":"spheres","radii":[0.5,1.0]},
//!  "modes":[{"k":0,"ell":1,"knots_t":[0.25,1.0],"values":[..],"monomial":[..]}, ..]}
//! ```
//!
//! Floats are written in shortest round-trip form, so loading reproduces
//! every coefficient bit for bit.

use serde::{Deserialize, Serialize};

use super::interpolant::{KnotSet, PolyharmonicInterpolant};
use super::lagrange::ModePolynomial;
use crate::error::{Error, Result};
use crate::harmonics::ModeIndex;

const FORMAT: &str = "polyharm-interpolant";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModeRecord {
    k: usize,
    ell: usize,
    knots_t: Vec<f64>,
    values: Vec<f64>,
    monomial: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct InterpolantFile {
    format: String,
    version: u32,
    n: usize,
    order: usize,
    k_max: usize,
    radius: f64,
    knots: KnotSet,
    modes: Vec<ModeRecord>,
}

impl PolyharmonicInterpolant {
    pub fn to_json(&self) -> String {
        let file = InterpolantFile {
            format: FORMAT.into(),
            version: VERSION,
            n: self.dimension(),
            order: self.order(),
            k_max: self.k_max(),
            radius: self.radius(),
            knots: self.knots().clone(),
            modes: self
                .modes()
                .iter()
                .map(|p| ModeRecord {
                    k: p.mode().k,
                    ell: p.mode().ell,
                    knots_t: p.knots_t().to_vec(),
                    values: p.values_at_knots().to_vec(),
                    monomial: p.monomial_coeffs().to_vec(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("interpolant values are finite")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InterpolantFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(Error::Parse(format!(
                "unsupported interpolant format {} v{}",
                file.format, file.version
            )));
        }
        if file.order != file.knots.order() {
            return Err(Error::Parse(format!(
                "order {} disagrees with the knot set",
                file.order
            )));
        }
        let modes = file
            .modes
            .into_iter()
            .map(|m| {
                ModePolynomial::from_parts(
                    ModeIndex::new(m.k, m.ell),
                    m.knots_t,
                    m.values,
                    m.monomial,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_modes(file.n, file.k_max, file.radius, file.knots, modes)
    }
}
