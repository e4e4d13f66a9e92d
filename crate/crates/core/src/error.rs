//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two vectors that must have equal length do not.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A channel vector is zero (or otherwise unusable) where a direction
    /// is required.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// A scalar argument is out of its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A network-model parameter is invalid (antenna count, variance, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A harness configuration field is invalid.
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig {
        field: &'static str,
        reason: String,
    },

    /// A requested rate cannot be supported by any power (zero gain).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A channels file could not be parsed or fails validation.
    #[error("channels file: {0}")]
    ChannelsFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
