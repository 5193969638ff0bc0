use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precision guard: alpha*n^theta = {magnitude:e} exceeds 2^40; largest safe n is {max_safe_n}")]
    PrecisionGuard { magnitude: f64, max_safe_n: u64 },

    #[error("phase magnitude {0:e} exceeds the 2^40 precision guard")]
    PhaseGuard(f64),

    #[error("window wraps around the circle: s = {s} must be below N/2 = {half}")]
    WindowWraps { s: f64, half: f64 },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("histograms have different binning")]
    BinningMismatch,

    #[error("problem too large: {what} = {size} exceeds the limit {limit}")]
    TooLarge { what: &'static str, size: u64, limit: u64 },

    #[error("no bound region applies: {0}")]
    RegionViolation(String),

    #[error("infeasible kappa point: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
