use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("blockage pattern {pattern} cannot be applied to a {layout} layout")]
    PatternMismatch {
        pattern: &'static str,
        layout: &'static str,
    },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("power {power:e} of element {element} is below the floor {floor:e}")]
    SingularityGuard {
        element: usize,
        power: f64,
        floor: f64,
    },

    #[error("invalid sweep value {value} for {sweep}: {reason}")]
    InvalidSweepValue {
        sweep: &'static str,
        value: f64,
        reason: String,
    },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg()))
    }
}

pub(crate) fn ensure_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
