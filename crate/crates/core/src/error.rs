use thiserror::Error;

use crate::harmonics::ModeIndex;

/// Errors raised by the analysis, interpolation and reporting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension n = {0} has no unit sphere (need n >= 2)")]
    NoSphere(usize),

    #[error("dimension n = {0} is not supported for basis construction (supported: 2, 3)")]
    UnsupportedDimension(usize),

    #[error("harmonic degree {k_max} exceeds the cap {cap}")]
    DegreeCap { k_max: usize, cap: usize },

    #[error("interpolation order {order} outside the supported range 1..={cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("mode {mode} is not valid in dimension {n}")]
    InvalidMode { mode: ModeIndex, n: usize },

    #[error("radius {r} lies outside the ball of radius {radius}")]
    OutOfDomain { r: f64, radius: f64 },

    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),

    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("trace has no coefficient above the underflow floor")]
    ZeroTrace,

    #[error("derivative order {order} exceeds the reliable range for Chebyshev degree {degree}")]
    IllConditionedDerivative { order: usize, degree: usize },

    #[error("knots {i} and {j} coincide at t = {value}")]
    DegenerateKnots { i: usize, j: usize, value: f64 },

    #[error("knot radius 0 cannot carry data for degree k = {k} >= 1")]
    ZeroRadiusPositiveDegree { k: usize },

    #[error("value for mode {mode} at knot {j} is not finite after scaling by r^-k (got {value})")]
    Magnitude {
        mode: ModeIndex,
        j: usize,
        value: f64,
    },

    #[error("missing input for mode {0}")]
    IncompleteInput(ModeIndex),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("C*R = {0} is the unresolved boundary case")]
    BoundaryCase(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
