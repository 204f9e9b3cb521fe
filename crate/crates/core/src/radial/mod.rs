//! Radial analysis of a function on the ball: sphere traces
//! `φ_{k,ℓ}(r) = ⟨f(r·), Y_{k,ℓ}⟩`, radial profiles `f_{k,ℓ}(t)` with
//! `φ_{k,ℓ}(r) = f_{k,ℓ}(r²) r^k`, per-sphere exponential decay rates, and the
//! seminorm `‖f|_N`.

mod decay;
mod function;
mod profile;
mod seminorm;
mod trace;

pub use decay::{
    estimate_decay, estimate_decay_from_maxima, DecayEstimate, DecayOptions, UNDERFLOW_FLOOR,
};
pub use function::{AnalyticFunction, BallFunction, SampledFunction};
pub use profile::{
    profiles_from_traces, radial_profile, radial_profiles, ProfileOptions, RadialProfile,
};
pub use seminorm::{scaled_derivative_sup, seminorm, SeminormEstimate, SUP_GRID_POINTS};
pub use trace::{sphere_trace_coefficients, sphere_traces, SphereTrace, TRACE_NOISE_FLOOR};

pub(crate) use function::check_radius;
