use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inputs outside the domain of a model (non-positive widths, degenerate
    /// band parameters, non-finite results).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A root could not be bracketed on the search interval.
    #[error("root bracketing failed for {what} on [{lo}, {hi}] meV (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    Bracket {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// The finite well is too small or too shallow to hold a bound state.
    #[error("no bound state: {0}")]
    Unbound(String),

    /// Time integration lost unitarity beyond the allowed drift.
    #[error("integrator drift {drift:e} exceeds {limit:e} (reduce dt)")]
    Drift { drift: f64, limit: f64 },

    /// Precondition of an operation does not hold.
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
