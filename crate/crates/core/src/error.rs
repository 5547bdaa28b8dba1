use thiserror::Error;

/// Errors produced by spec validation, root solving, quadrature and
/// evolution routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid reservoir spec: {0}")]
    InvalidSpec(String),

    #[error("level index {index} outside truncation range ±{max}")]
    IndexOutOfRange { index: i64, max: i64 },

    #[error("secular function evaluated within {distance:e} of the pole at {pole}")]
    EvaluateAtPole { pole: f64, distance: f64 },

    #[error("no sign change while bracketing root in interval [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("root refinement did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("near-zero spectral gap {gap:e} at level offset {offset}")]
    SmallDenominator { offset: i64, gap: f64 },

    #[error("quadrature failed to converge (estimated error {error:e})")]
    QuadratureFailure { error: f64 },

    #[error("time grid must start at 0 and be strictly increasing")]
    BadGrid,

    #[error("ODE step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("amplitude magnitude below {limit:e}; log-derivative undefined")]
    AmplitudeUnderflow { limit: f64 },

    #[error("{0}")]
    MethodMismatch(String),

    #[error("deformation parameter {eta} at or beyond pole-merge threshold {eta_c}")]
    DeformationCritical { eta: f64, eta_c: f64 },

    #[error("no zero crossing of the reservoir amplitude inside cycle {cycle}")]
    NoZeroCrossing { cycle: usize },

    #[error("Bessel site expansion not available for C^2 = {c2} (requires C^2 <= 1/2)")]
    BesselPathOutOfRange { c2: f64 },

    #[error("expansion truncation bound exceeded (needed {needed} orders, cap {cap})")]
    TruncationOverflow { needed: usize, cap: usize },
}
