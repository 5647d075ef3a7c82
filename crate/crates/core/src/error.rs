use thiserror::Error;

use crate::dmc::CapacityResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u64),

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("Blahut-Arimoto did not converge after {} iterations (gap bound {gap:e})", .best.iterations)]
    NotConverged { best: Box<CapacityResult>, gap: f64 },

    #[error("scheme {0} has no loss substitution; use the K-copy W-state analysis")]
    UnsupportedScheme(&'static str),

    #[error("target is infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and >= 0",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}

pub(crate) fn check_power_of_two(m: u64) -> Result<()> {
    if m >= 2 && m.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(m))
    }
}
