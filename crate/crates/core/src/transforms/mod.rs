//! Change-of-variable constructions: the ground-state substitution and the map between the
//! critical and subcritical Hardy functionals, each with a checker.

mod crit_subcrit;
mod ground_state;

pub use crit_subcrit::{
    crit_subcrit_identity_check, crit_subcrit_identity_check_with, crit_subcrit_map, CritSubcritContext, EqualityReport,
};
pub use ground_state::{ground_state, ground_state_lower_bound_check};

use thiserror::Error;

use crate::catalog::CatalogError;
use crate::model::ModelError;
use crate::quadrature::QuadError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("profile must be compactly supported inside (0, {limit}), got [{lo}, {hi}]")]
    SupportTouchesBoundary { lo: f64, hi: f64, limit: f64 },
    #[error("profile takes the negative value {value} at r = {radius}")]
    SignedProfile { radius: f64, value: f64 },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
