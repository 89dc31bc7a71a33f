use thiserror::Error;

use crate::degree_classes::ClassError;
use crate::graph::{GraphError, StreamMode};

/// Errors from configuring or feeding the streaming estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("{name} must be {requirement}, got {value}")]
    OutOfRange {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error(transparent)]
    Classes(#[from] ClassError),
    #[error("expected a {expected} stream, got a {found} stream")]
    WrongMode {
        expected: StreamMode,
        found: StreamMode,
    },
    #[error(transparent)]
    Stream(#[from] GraphError),
}

pub(crate) fn require(
    ok: bool,
    name: &'static str,
    requirement: &'static str,
    value: f64,
) -> Result<(), EstimatorError> {
    if ok {
        Ok(())
    } else {
        Err(EstimatorError::OutOfRange {
            name,
            requirement,
            value,
        })
    }
}

pub(crate) fn require_mode(expected: StreamMode, found: StreamMode) -> Result<(), EstimatorError> {
    if expected == found {
        Ok(())
    } else {
        Err(EstimatorError::WrongMode { expected, found })
    }
}
