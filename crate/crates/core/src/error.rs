use thiserror::Error;

/// Errors raised by the computations in this crate.
///
/// The variants are grouped by how a caller is expected to react: bad input,
/// a truncation too coarse to certify the requested quantity, or two
/// independent evaluation routes that disagree (which always means a bug).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("triple lies outside Lambda_{n}: {reason}")]
    OutsideLambda { n: usize, reason: String },

    #[error("uncertifiable: {0}")]
    Uncertifiable(String),

    #[error("cross-route disagreement in {quantity}: {left} vs {right} (allowed {allowed:e})")]
    CrossRouteDisagreement { quantity: String, left: f64, right: f64, allowed: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("q must lie in (0,1), got {q}")))
    }
}
