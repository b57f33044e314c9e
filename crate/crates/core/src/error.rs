//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight mismatch: {left} vs {right}")]
    WeightMismatch { left: i64, right: i64 },

    #[error("expected a cusp form (constant term zero and flagged cuspidal)")]
    NotCuspForm,

    #[error("coefficient of q^{n} is not an integer")]
    NonIntegralCoefficient { n: usize },

    #[error("sigma_r(n) requires n >= 1")]
    SigmaOfZero,

    #[error("Bernoulli number B_{k} not supported here (need even k >= 2)")]
    BernoulliUnsupported { k: u32 },

    #[error("Eisenstein series E_{k} requires even k >= 2")]
    EisensteinUnsupported { k: u32 },

    #[error("invalid eta quotient: {reason}")]
    InvalidEtaQuotient { reason: String },

    #[error("unsupported space S_{k}(Gamma_0({level}))")]
    UnsupportedSpace { k: i64, level: u64 },

    #[error("form is not in the space: coefficient of q^{n} does not match the reconstruction")]
    NotInSpace { n: usize },

    #[error("insufficient precision: have {have}, need at least {need}")]
    InsufficientPrecision { have: usize, need: usize },

    #[error("precision exhausted: series has {have} coefficients but the target accuracy needs {need}")]
    PrecisionExhausted { have: usize, need: usize },

    #[error("divergent regime: {reason}")]
    DivergentRegime { reason: String },

    #[error("quadrature not converged: successive refinements changed by {last:e} after {prev:e}")]
    QuadratureNotConverged { prev: f64, last: f64 },

    #[error("point is not in the upper half-plane: y = {y}")]
    NotUpperHalfPlane { y: f64 },

    #[error("level {level} not supported here (need one of {supported:?})")]
    UnsupportedLevel { level: u64, supported: Vec<u64> },

    #[error("form of level {form_level} does not live on Gamma_0({level})")]
    LevelMismatch { form_level: u64, level: u64 },

    #[error("recipe kind not supported for {what}: {kind}")]
    UnsupportedRecipe { what: &'static str, kind: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
