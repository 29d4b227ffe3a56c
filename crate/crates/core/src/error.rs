//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("channel count {channels} exceeds the supported maximum {max}")]
    TooManyChannels { channels: usize, max: usize },

    #[error("zero-arbitrary pattern must not contain a click symbol (channel {channel})")]
    ClickInPattern { channel: usize },

    #[error("Fisher matrix is not invertible (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error(
        "equivalent-efficiency root not bracketed: information {lower:.6e} at the lower \
         endpoint, {upper:.6e} at the upper endpoint, target {target:.6e}"
    )]
    RootNotBracketed { lower: f64, upper: f64, target: f64 },

    #[error(
        "support violation: outcome {outcome} observed with frequency {frequency:.6e} \
         but has zero model probability"
    )]
    SupportViolation { outcome: usize, frequency: f64 },

    #[error("calibration channel {channel} recorded no zero-count events; efficiency unresolvable at this intensity")]
    UnresolvableCalibration { channel: usize },

    #[error("inconsistent calibration: channel {channel} implies efficiency {value:.6} above unity")]
    InconsistentCalibration { channel: usize, value: f64 },

    #[error("transmission inference failed: channel {channel} implies transmission {value:.6} outside [0, 1]")]
    InconsistentTransmission { channel: usize, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
