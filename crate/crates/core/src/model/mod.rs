//! Radial profiles, weights and the two-parameter homogeneous setting.

pub mod expr;
mod jet;
pub mod profile;
pub mod setting;
pub mod text;
pub mod weight;

pub use expr::Expr;
pub use profile::{EdgeWarning, RadialProfile, Support};
pub use setting::HomogeneousSetting;
pub use weight::{LogFactor, LogKind, Superweight, WeightSpec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("invalid support [{lo}, {hi}]")]
    InvalidSupport { lo: f64, hi: f64 },
    #[error("breakpoints must be finite positive radii")]
    InvalidBreakpoints,
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("profile evaluates to {value} at r = {radius}")]
    EvaluationFault { radius: f64, value: f64 },
    #[error("derivative order must be at least 1")]
    InvalidOrder,
    #[error("dilation factor must be positive and finite, got {0}")]
    InvalidDilation(f64),
    #[error("invalid homogeneous setting: Q = {q}, sigma = {sigma} (need Q > 1, sigma > 0)")]
    InvalidSetting { q: f64, sigma: f64 },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
}
