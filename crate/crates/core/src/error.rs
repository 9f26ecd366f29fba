use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no interferer in window")]
    NoInterferer,

    #[error("empty point pattern")]
    EmptyPattern,

    #[error("pattern is already duplicated")]
    AlreadyDuplicated,

    #[error("empty sample set")]
    EmptySamples,

    #[error("regime unreachable at this sample size: {0}")]
    RegimeUnreachable(String),

    #[error("missing auxiliary moment; run `{estimator}` first")]
    MissingAuxMoment { estimator: &'static str },

    #[error("auxiliary moment tag mismatch: expected {expected}, got {got}")]
    AuxMomentVariant { expected: &'static str, got: &'static str },

    #[error("window radius {radius} exceeds the limit {limit}")]
    WindowTooLarge { radius: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
