//! Real spherical harmonics on S^{n-1}, the dimension count `d_k`, and
//! quadrature rules for the normalized scalar product
//! `(1/ω_{n-1}) ∫ u v dθ`.
//!
//! Modes are addressed by [`ModeIndex`] `(k, ℓ)` with `1 ≤ ℓ ≤ d_k` and are
//! always laid out in ascending `(k, ℓ)` order; [`ModeLayout`] maps between
//! the pair and the flat position used by every coefficient vector in the
//! crate.

mod basis;
mod quadrature;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use basis::{build_basis, HarmonicBasis, MAX_BASIS_DEGREE};
pub use quadrature::{
    build_quadrature, gauss_legendre, inner_product, QuadratureRule, SphereTransform,
};

/// One spherical-harmonic channel: degree `k` and 1-based index `ell` within
/// that degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub k: usize,
    pub ell: usize,
}

impl ModeIndex {
    pub const fn new(k: usize, ell: usize) -> Self {
        Self { k, ell }
    }

    /// Checks `1 ≤ ell ≤ d_k` for ambient dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let d = mode_dimension(n, self.k)?;
        if self.ell == 0 || self.ell > d {
            return Err(Error::InvalidMode { mode: *self, n });
        }
        Ok(())
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k, self.ell)
    }
}

fn binomial(upper: i64, lower: i64) -> u128 {
    if upper < 0 || lower < 0 || lower > upper {
        return 0;
    }
    let lower = lower.min(upper - lower) as u128;
    let upper = upper as u128;
    let mut acc: u128 = 1;
    for i in 1..=lower {
        // acc * (upper - lower + i) is divisible by i at every step.
        acc = acc * (upper - lower + i) / i;
    }
    acc
}

/// Number of linearly independent spherical harmonics of degree `k` on
/// S^{n-1}: `C(n+k-1, k) - C(n+k-3, k-2)`.
pub fn mode_dimension(n: usize, k: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::NoSphere(n));
    }
    let (n, k) = (n as i64, k as i64);
    let d = binomial(n + k - 1, k) - binomial(n + k - 3, k - 2);
    usize::try_from(d)
        .map_err(|_| Error::InvalidArgument(format!("d_k overflows for n = {n}, k = {k}")))
}

/// Flat layout of all modes with `k ≤ k_max` in ascending `(k, ℓ)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeLayout {
    n: usize,
    k_max: usize,
    /// `offsets[k]` is the flat index of `(k, 1)`; `offsets[k_max + 1]` is the total.
    offsets: Vec<usize>,
}

impl ModeLayout {
    pub fn new(n: usize, k_max: usize) -> Result<Self> {
        let mut offsets = Vec::with_capacity(k_max + 2);
        let mut total = 0usize;
        offsets.push(0);
        for k in 0..=k_max {
            total += mode_dimension(n, k)?;
            offsets.push(total);
        }
        Ok(Self { n, k_max, offsets })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Total number of modes.
    pub fn len(&self) -> usize {
        self.offsets[self.k_max + 1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `d_k` for `k ≤ k_max`.
    pub fn degree_len(&self, k: usize) -> usize {
        self.offsets[k + 1] - self.offsets[k]
    }

    /// Flat index range covering every `ℓ` of degree `k`.
    pub fn degree_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn index_of(&self, mode: ModeIndex) -> Option<usize> {
        if mode.k > self.k_max || mode.ell == 0 || mode.ell > self.degree_len(mode.k) {
            return None;
        }
        Some(self.offsets[mode.k] + mode.ell - 1)
    }

    pub fn mode_at(&self, index: usize) -> ModeIndex {
        assert!(index < self.len(), "mode index {index} out of range");
        let k = self.offsets.partition_point(|&o| o <= index) - 1;
        ModeIndex::new(k, index - self.offsets[k] + 1)
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        (0..=self.k_max)
            .flat_map(move |k| (1..=self.degree_len(k)).map(move |ell| ModeIndex::new(k, ell)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// d_k as the literal product `(n+2k-2)(n+k-3)···(k+1) / (n-2)!`.
    fn literal_product(n: u128, k: u128) -> u128 {
        let mut num = n + 2 * k - 2;
        for f in (k + 1)..=(n + k - 3) {
            num *= f;
        }
        let fact: u128 = (1..=n - 2).product();
        assert_eq!(num % fact, 0);
        num / fact
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(mode_dimension(3, 0).unwrap(), 1);
        assert_eq!(mode_dimension(3, 2).unwrap(), 5);
        assert_eq!(mode_dimension(2, 5).unwrap(), 2);
        assert_eq!(mode_dimension(2, 0).unwrap(), 1);
        assert_eq!(mode_dimension(4, 0).unwrap(), 1);
    }

    #[test]
    fn dimension_rejects_n_below_two() {
        assert_eq!(mode_dimension(1, 3), Err(Error::NoSphere(1)));
        assert_eq!(mode_dimension(0, 0), Err(Error::NoSphere(0)));
    }

    #[test]
    fn binomial_form_matches_literal_product() {
        for n in 3..=7u128 {
            for k in 1..=60u128 {
                assert_eq!(
                    mode_dimension(n as usize, k as usize).unwrap() as u128,
                    literal_product(n, k),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn literal_product_misreads_n_two() {
        // The product form degenerates to 2k at n = 2; the binomial form gives 2.
        for k in 1..=20usize {
            assert_eq!(mode_dimension(2, k).unwrap(), 2);
        }
    }

    #[test]
    fn dimension_polynomial_bound() {
        for n in 2..=3usize {
            for k in 1..=200usize {
                let d = mode_dimension(n, k).unwrap() as f64;
                assert!(d <= 3.0 * (k as f64).powi(n as i32 - 2), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn degree_two_harmonics_count_in_three_variables() {
        // Quadratic forms in 3 variables (6) minus the trace condition (1).
        let quadratics = 6;
        assert_eq!(mode_dimension(3, 2).unwrap(), quadratics - 1);
    }

    #[test]
    fn layout_round_trips_indices() {
        for n in [2, 3, 4] {
            let layout = ModeLayout::new(n, 9).unwrap();
            for (i, mode) in layout.modes().enumerate() {
                assert_eq!(layout.index_of(mode), Some(i));
                assert_eq!(layout.mode_at(i), mode);
            }
            assert_eq!(layout.modes().count(), layout.len());
        }
        let layout = ModeLayout::new(3, 4).unwrap();
        assert_eq!(layout.len(), 25);
        assert_eq!(layout.index_of(ModeIndex::new(2, 6)), None);
        assert_eq!(layout.index_of(ModeIndex::new(5, 1)), None);
    }

    #[test]
    fn mode_validation() {
        assert!(ModeIndex::new(2, 5).validate(3).is_ok());
        assert!(ModeIndex::new(2, 6).validate(3).is_err());
        assert!(ModeIndex::new(0, 0).validate(3).is_err());
        assert!(ModeIndex::new(7, 2).validate(2).is_ok());
        assert!(ModeIndex::new(7, 3).validate(2).is_err());
    }
}
