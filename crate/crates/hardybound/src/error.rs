//! Error types shared across the crate.
//!
//! Two layers: [`QuadFailure`] is the low-level outcome of an integration
//! attempt (divergent, budget exhausted, bad integrand values), and [`Error`]
//! is the crate-wide type that also covers input validation. Divergence is
//! deliberately a *distinct* variant: for boundedness criteria a divergent
//! integral is a meaningful verdict ("unbounded"), not a bug, and callers need
//! to be able to tell it apart from a numerical failure.

use thiserror::Error;

/// Failures from adaptive quadrature and Riemann–Stieltjes integration.
#[derive(Debug, Clone, Error)]
pub enum QuadFailure {
    /// Refinement drove an interval to the width floor while its contribution
    /// kept growing — the signature of a non-integrable singularity.
    #[error("integral appears divergent near {location:.6e}")]
    Divergent { location: f64 },

    /// The integrand produced NaN. Reported with the offending abscissa.
    #[error("integrand returned NaN at {location:.6e}")]
    NaN { location: f64 },

    /// A function declared monotone produced a decrement (beyond noise slack)
    /// where an increment was required.
    #[error("accumulation function is not monotone near {location:.6e} (increment {increment:.3e})")]
    NotMonotone { location: f64, increment: f64 },

    /// The evaluation budget ran out before the error target was met. The
    /// partial value is reported so callers can decide what to do with it.
    #[error(
        "evaluation budget exhausted after {evals} evaluations \
         (unresolved error {error:.3e}, partial value {partial:.6e})"
    )]
    Budget {
        evals: usize,
        error: f64,
        partial: f64,
    },
}

impl QuadFailure {
    /// True for the divergence variant (callers often map it to an
    /// "unbounded" verdict instead of an error).
    pub fn is_divergent(&self) -> bool {
        matches!(self, QuadFailure::Divergent { .. })
    }
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] QuadFailure),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
