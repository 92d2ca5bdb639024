//! Shared error type for the metric operations.

use thiserror::Error;

use crate::timeline::Time;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("timeline has no instants")]
    EmptyTimeline,
    #[error("timeline needs at least {needed} instants, found {found}")]
    TooFewInstants { needed: usize, found: usize },
    #[error("timeline instants are not strictly increasing at {instant}")]
    NonMonotoneTimeline { instant: Time },
    #[error("timeline instant {instant} lies outside the horizon")]
    InstantOutOfHorizon { instant: Time },
    #[error("matrix orientation must be larger-is-better; call normalize_orientation first")]
    NotNormalized,
    #[error("epsilon {0} is outside [0, 1]")]
    EpsilonOutOfRange(f64),
    #[error("curve needs at least 2 points, found {0}")]
    CurveTooShort(usize),
    #[error("curve time stamps are not strictly increasing at point {index}")]
    NonMonotoneCurve { index: usize },
    #[error("curve value {value} at point {index} is outside [0, 1]")]
    CurveValueOutOfRange { index: usize, value: f64 },
}
