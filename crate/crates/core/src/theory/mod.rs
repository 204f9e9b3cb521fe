//! Convergence conditions, the error-bound shape and the divergence example.

mod divergence;
mod theorem1;
mod theorem2;

pub use divergence::{
    divergence_demo, DivergenceDemo, Verdict, DIVERGENCE_MAX_DEGREE, GROWTH_THRESHOLD,
};
pub use theorem1::{
    check_theorem1, summarize_theorem1, theorem1_bound, theorem1_sweep, KnotRule, Theorem1Report,
    Theorem1Setup, Theorem1Sweep,
};
pub use theorem2::{check_theorem2, tail_ratio, SphereDecay, Theorem2Report};
