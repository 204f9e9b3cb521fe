//! Polyharmonic interpolation of smooth functions on the ball `B_R ⊂ ℝⁿ`.
//!
//! A function is expanded as `f(x) = Σ f_{k,ℓ}(r²) r^k Y_{k,ℓ}(θ)`; the
//! interpolant of order `N` replaces every radial profile `f_{k,ℓ}` by the
//! degree `≤ N-1` polynomial `h_{k,ℓ}` that matches it at `N` knots in
//! `t = r²`. The resulting `h` satisfies `Δ^N h = 0`.
//!
//! Modules:
//! - [`harmonics`]: spherical harmonics, `d_k`, sphere quadrature.
//! - [`radial`]: sphere traces, radial profiles, decay and seminorm diagnostics.
//! - [`interp`]: Lagrange fits per mode, evaluation, errors, norms, `Δ^p`.
//! - [`theory`]: convergence conditions, error-bound shape, divergence example.

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod error;
pub mod harmonics;
pub mod interp;
pub mod numeric;
pub mod radial;
pub mod theory;

pub use error::{Error, Result};
pub use harmonics::{ModeIndex, ModeLayout};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
