//! The constant `c_p`, extremizer families and ratio probes.

mod family;
mod frs;
mod probe;

pub use family::{
    log_hardy_closed_forms, log_hardy_family, log_hardy_quadrature, Anchor, ExtremizerFamily, TRANSITION_FRACTION,
};
pub use frs::{frs_constant, frs_minimizer, frs_phi, golden_section};
pub use probe::{natural_family, probe, probe_with, FitModel, ProbeResult};

use thiserror::Error;

use crate::model::ModelError;
use crate::quadrature::QuadError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SharpnessError {
    #[error("c_p is defined for p >= 2, got p = {0}")]
    FrsExponent(f64),
    #[error("invalid family parameters: {0}")]
    InvalidParameters(String),
    #[error("index {index}: {reason}")]
    FamilyIndex { index: f64, reason: String },
    #[error("a probe needs at least 3 indices, got {0}")]
    TooFewIndices(usize),
    #[error("probe indices must be strictly increasing")]
    UnsortedIndices,
    #[error("no extremizer probe of kind {kind} for {family}")]
    UnsupportedProbe { family: String, kind: String },
    #[error("quadrature did not converge at index {0}")]
    NotConverged(f64),
    #[error("extrapolation fit is singular")]
    SingularFit,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
