//! Adaptive integration on `[0, inf)` with algebraic-logarithmic endpoint behavior, and the
//! weighted radial `L^p` norms built on it.

mod adaptive;
mod endpoint;
mod gk;
mod measured;
mod weighted;

pub use adaptive::{integrate, integrate_fn};
pub use measured::Measured;
pub use weighted::{lp_radial_norm, lp_radial_norm_in, weighted_integral, weighted_integral_in, NormResult};

use crate::model::ModelError;
use thiserror::Error;

/// Environment variable that overrides the default tolerance (both absolute and relative).
pub const TOLERANCE_ENV: &str = "HARDYLAB_TOL";

/// Stopping rule: an estimate is accepted once its error is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-10, max_panels: 10_000 }
    }
}

impl Tolerance {
    pub fn uniform(t: f64) -> Self {
        Self { abs: t, rel: t, ..Self::default() }
    }

    /// Default tolerance, or the value of `HARDYLAB_TOL` when it parses as a positive number.
    pub fn from_env() -> Self {
        std::env::var(TOLERANCE_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|t| *t > 0.0 && t.is_finite())
            .map(Self::uniform)
            .unwrap_or_default()
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    fn validate(&self) -> Result<(), QuadError> {
        if self.abs > 0.0 && self.rel >= 0.0 && self.max_panels > 0 {
            Ok(())
        } else {
            Err(QuadError::InvalidTolerance)
        }
    }
}

/// Integrand behavior `|r - r0|^lambda |log|r - r0||^mu` near an endpoint `r0`.
///
/// At `r0 = inf` the exponents describe the integrand after the substitution `d = 1/r`
/// (including the Jacobian `1/d^2`), so `lambda = -nu - 2` for an integrand decaying like `r^nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityAnnotation {
    pub location: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl SingularityAnnotation {
    pub fn algebraic(location: f64, lambda: f64) -> Self {
        Self { location, lambda, mu: 0.0 }
    }

    pub fn new(location: f64, lambda: f64, mu: f64) -> Self {
        Self { location, lambda, mu }
    }

    /// Integrable iff `lambda > -1`, or `lambda = -1` with a log factor decaying faster than `1/L`.
    pub fn is_integrable(&self) -> bool {
        self.lambda > -1.0 || (self.lambda == -1.0 && self.mu < -1.0)
    }

    /// `lambda` within `1e-6` above the integrability threshold.
    pub fn is_fragile(&self) -> bool {
        self.lambda > -1.0 && self.lambda <= -1.0 + 1e-6
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
    /// False when the panel budget ran out before the tolerance was met.
    pub converged: bool,
    /// Set when an endpoint exponent sits just above the integrability threshold.
    pub fragile: bool,
}

impl IntegralResult {
    pub fn zero() -> Self {
        Self { value: 0.0, abs_error: 0.0, subdivisions: 0, converged: true, fragile: false }
    }

    pub fn measured(&self) -> Measured {
        Measured::new(self.value, self.abs_error)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("tolerances must be positive and the panel budget non-zero")]
    InvalidTolerance,
    #[error("annotation at r = {0} is not an endpoint of the interval")]
    AnnotationNotAtEndpoint(f64),
    #[error("an infinite endpoint needs a singularity annotation")]
    MissingInfiniteAnnotation,
    #[error("non-integrable endpoint behavior at r = {location}: lambda = {lambda}, mu = {mu}")]
    NonIntegrable { location: f64, lambda: f64, mu: f64 },
    #[error("divergent integral at r = {location}: {detail} gives lambda = {lambda}, mu = {mu}")]
    Divergent { location: f64, lambda: f64, mu: f64, detail: String },
    #[error("integrand is {value} at r = {radius}")]
    EvaluationFault { radius: f64, value: f64 },
    #[error("endpoint model does not fit the integrand near r = {0}")]
    TailModel(f64),
    #[error("cannot determine the power behavior of the profile near r = {0}")]
    UnresolvedEndpoint(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}
