use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid forcing profile: {0}")]
    InvalidForcing(String),

    /// The adaptive stepper asked for a step below `min_step`.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    StepBudget { t: f64, max_steps: usize },

    #[error("Moebius reduction requires gamma = 1 (got {gamma})")]
    NotMoebius { gamma: f64 },

    #[error("monodromy determinant drifted by {drift:e}")]
    DeterminantDrift { drift: f64 },

    /// A zero of the forcing with (almost) vanishing slope.
    #[error("degenerate forcing: zero at t = {t} has slope {slope:e}")]
    DegenerateForcing { t: f64, slope: f64 },

    #[error("no sign change bracketing the k = {k} boundary at b = {b}, mu = {mu}")]
    BracketFailure { k: i64, b: f64, mu: f64 },

    #[error("quadrature stalled after {panels} panels (error estimate {estimate:e})")]
    QuadratureStall { panels: usize, estimate: f64 },

    #[error("argument z = {z} below the asymptotic domain")]
    DomainTooSmall { z: f64 },

    #[error("outside the asymptotic regime: {0}")]
    OutOfRegime(String),

    #[error("dx/dt changes sign near t = {t}")]
    SignChange { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
