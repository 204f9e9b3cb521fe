//! Polyharmonic interpolation by per-mode Lagrange polynomials in `t = r²`.

mod interpolant;
mod io;
mod lagrange;
mod laplacian;
mod norms;

pub use interpolant::{
    interpolate_general, interpolate_spheres, KnotSet, ModeKnots, PolyharmonicInterpolant,
};
pub use lagrange::{
    barycentric_weights, fit_mode_polynomial, lagrange_basis, ModePolynomial, MAX_ORDER,
};
pub use laplacian::{apply_radial_laplacian, radial_laplacian_power, LaplacianPower};
pub use norms::{l2_error_on_sphere, l2_norm_ball, BallNorm, SphereError};
