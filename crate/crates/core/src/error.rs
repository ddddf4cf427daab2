use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration value violates its invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The path-loss model was asked for a non-positive distance.
    #[error("path loss undefined for distance {0} m (must be > 0)")]
    NonPositiveDistance(f64),

    /// Energy efficiency of a run that spent no transmit energy.
    #[error("no transmit energy spent; energy efficiency is undefined")]
    ZeroEnergy,

    /// The structured-text config file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
