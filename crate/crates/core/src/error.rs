use thiserror::Error;

/// Errors raised by the physical model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{quantity} = {value} is outside {expected}")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("no visibility window: h = {altitude_m} m, L0 = {link_length_m} m gives zero flyby time")]
    NoVisibility { altitude_m: f64, link_length_m: f64 },

    #[error("t = {t} s is outside the flyby window [0, {flyby_time}] s")]
    OutsideWindow { t: f64, flyby_time: f64 },

    #[error("non-physical geometry: zenith-angle cosine {0} outside [-1, 1]")]
    NonPhysicalGeometry(f64),

    #[error("signal lost: transmission is zero, pair fidelity undefined")]
    ZeroTransmission,

    #[error("quadrature did not converge after {refinements} refinements (last relative change {last_change:e}, n = {samples})")]
    QuadratureNotConverged {
        refinements: usize,
        samples: usize,
        last_change: f64,
    },

    #[error("unphysical Werner parameter {value} at nesting level {level}")]
    UnphysicalWerner { level: usize, value: f64 },

    #[error("state is not of Werner form: {0}")]
    NotWerner(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn check_range(quantity: &'static str, value: f64, lo: f64, hi: f64, expected: &'static str) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(ModelError::OutOfRange {
            quantity,
            value,
            expected,
        })
    }
}
