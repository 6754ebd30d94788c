//! Inequality families: admissibility, sharp constants and two-sided evaluation on radial
//! profiles.

mod admissibility;
mod constants;
pub(crate) mod evaluate;
mod holder;
pub(crate) mod remainder;
pub(crate) mod report;
mod stability;
mod uncertainty;

pub use admissibility::{validate, AdmissibilityVerdict, ClassicalStatus};
pub use constants::{sharp_constant, sharp_constant_for, SharpConstant, Sharpness};
pub use evaluate::{evaluate_sides, evaluate_sides_with, log_hardy_gamma_p_sides};
pub use holder::{holder_log_power, holder_mixed_power, holder_power, HolderSides};
pub use remainder::{remainder_check, remainder_quantities, RemainderQuantities};
pub use report::{Direction, Verdict, VerificationReport};
pub use stability::{default_r_grid, stability_check, stability_distance};
pub use uncertainty::{uncertainty_check, UncertaintyVariant};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{HomogeneousSetting, ModelError};
use crate::quadrature::QuadError;
use crate::sharpness::SharpnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    ExtendedCKN,
    ExtendedCKNCritical,
    EulerHardy,
    EulerHardyCritical,
    AnisotropicCKN,
    RemainderHardy,
    StabilityHardy,
    CriticalLogHardy,
    UncertaintyA,
    UncertaintyB,
    Superweight,
    SuperweightHigherOrder,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::ExtendedCKN,
        Family::ExtendedCKNCritical,
        Family::EulerHardy,
        Family::EulerHardyCritical,
        Family::AnisotropicCKN,
        Family::RemainderHardy,
        Family::StabilityHardy,
        Family::CriticalLogHardy,
        Family::UncertaintyA,
        Family::UncertaintyB,
        Family::Superweight,
        Family::SuperweightHigherOrder,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::ExtendedCKN => "ExtendedCKN",
            Family::ExtendedCKNCritical => "ExtendedCKNCritical",
            Family::EulerHardy => "EulerHardy",
            Family::EulerHardyCritical => "EulerHardyCritical",
            Family::AnisotropicCKN => "AnisotropicCKN",
            Family::RemainderHardy => "RemainderHardy",
            Family::StabilityHardy => "StabilityHardy",
            Family::CriticalLogHardy => "CriticalLogHardy",
            Family::UncertaintyA => "UncertaintyA",
            Family::UncertaintyB => "UncertaintyB",
            Family::Superweight => "Superweight",
            Family::SuperweightHigherOrder => "SuperweightHigherOrder",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

/// Family parameters; each family reads the subset it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Replaces the setting's `Q` for this instance.
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q_override: Option<f64>,
}

impl Params {
    pub(crate) fn get(&self, name: &'static str) -> Result<f64, CatalogError> {
        let v = match name {
            "p" => self.p,
            "q" => self.q,
            "r" => self.r,
            "delta" => self.delta,
            "a" => self.a,
            "b" => self.b,
            "c" => self.c,
            "alpha" => self.alpha,
            "beta" => self.beta,
            "m" => self.m,
            "gamma" => self.gamma,
            "R" => self.big_r,
            "k" => self.k,
            "Q" => self.q_override,
            _ => None,
        };
        v.ok_or(CatalogError::MissingParameter(name))
    }

    fn all(&self) -> [(&'static str, Option<f64>); 14] {
        [
            ("p", self.p),
            ("q", self.q),
            ("r", self.r),
            ("delta", self.delta),
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("m", self.m),
            ("gamma", self.gamma),
            ("R", self.big_r),
            ("k", self.k),
            ("Q", self.q_override),
        ]
    }
}

/// A family with parameters that passed [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityInstance {
    family: Family,
    params: Params,
    setting: HomogeneousSetting,
}

impl InequalityInstance {
    pub fn new(family: Family, params: Params, setting: HomogeneousSetting) -> Result<Self, CatalogError> {
        let verdict = validate(family, &params, &setting);
        if !verdict.admissible {
            return Err(CatalogError::Inadmissible { family, failed: verdict.failed_conditions });
        }
        let setting = effective_setting(&params, &setting)?;
        Ok(Self { family, params, setting })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// The setting in force, with any `Q` override applied.
    pub fn setting(&self) -> &HomogeneousSetting {
        &self.setting
    }

    pub(crate) fn get(&self, name: &'static str) -> f64 {
        self.params.get(name).expect("validated instance has its parameters")
    }
}

pub(crate) fn effective_setting(
    params: &Params,
    setting: &HomogeneousSetting,
) -> Result<HomogeneousSetting, CatalogError> {
    match params.q_override {
        Some(q) => Ok(HomogeneousSetting::with_sigma(q, setting.sigma())?),
        None => Ok(*setting),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("missing parameter '{0}'")]
    MissingParameter(&'static str),
    #[error("{family} is not admissible: {}", failed.join("; "))]
    Inadmissible { family: Family, failed: Vec<String> },
    #[error("{family}: Q = {q} selects the {expected} branch")]
    BranchMismatch { family: Family, q: f64, expected: &'static str },
    #[error("exponent relation violated: {0}")]
    ExponentRelation(String),
    #[error("profile must be compactly supported away from 0")]
    ProfileSupport,
    #[error("quadrature did not converge: value {value}, error estimate {error}")]
    NotConverged { value: f64, error: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sharpness(#[from] SharpnessError),
}
