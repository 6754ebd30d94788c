use serde::Serialize;

use super::admissibility::is_critical_ckn;
use super::{effective_setting, CatalogError, Family, InequalityInstance, Params};
use crate::model::HomogeneousSetting;
use crate::sharpness::frs_constant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sharpness {
    Sharp,
    /// Optimality is not asserted for these parameters; this does not mean the constant is
    /// known to be improvable.
    NotClaimedSharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpConstant {
    pub value: f64,
    pub sharpness: Sharpness,
}

fn flag(sharp: bool) -> Sharpness {
    if sharp {
        Sharpness::Sharp
    } else {
        Sharpness::NotClaimedSharp
    }
}

/// `(Q - p)/p` for case (i) of the superweight inequalities, `(Q - p + alpha beta)/p` for case (ii).
pub(crate) fn superweight_base(inst: &InequalityInstance) -> f64 {
    let (p, alpha, beta) = (inst.get("p"), inst.get("alpha"), inst.get("beta"));
    let q = inst.setting().q();
    let ab = alpha * beta;
    if ab > 0.0 {
        (q - p) / p
    } else {
        (q - p + ab) / p
    }
}

/// Hardy constant exponent `(Q - p - alpha p)/p` used by the remainder and stability families.
pub(crate) fn ground_state_exponent(q: f64, p: f64, alpha: f64) -> f64 {
    (q - p - alpha * p) / p
}

/// Closed-form constant of an admissible instance together with its sharpness flag.
pub fn sharp_constant(inst: &InequalityInstance) -> SharpConstant {
    let q = inst.setting().q();
    let p = || inst.get("p");
    match inst.family() {
        Family::ExtendedCKN => {
            let (p, qq, a, b, delta) = (p(), inst.get("q"), inst.get("a"), inst.get("b"), inst.get("delta"));
            let value = (p / (q - p * (1.0 - a))).abs().powf(delta);
            let sharp = (p == qq && a - b == 1.0)
                || (p != qq && p * (1.0 - a) + b * qq != 0.0)
                || delta == 0.0
                || delta == 1.0;
            SharpConstant { value, sharpness: flag(sharp) }
        }
        Family::ExtendedCKNCritical => {
            let delta = inst.get("delta");
            SharpConstant { value: p().powf(delta), sharpness: flag(delta == 0.0 || delta == 1.0) }
        }
        Family::EulerHardy => {
            let p = p();
            SharpConstant { value: (p / (q - inst.get("alpha") * p)).abs(), sharpness: Sharpness::Sharp }
        }
        Family::EulerHardyCritical => SharpConstant { value: p(), sharpness: Sharpness::Sharp },
        Family::AnisotropicCKN => {
            let value = (q - (inst.get("a") + inst.get("b") + 1.0)).abs() / p();
            SharpConstant { value, sharpness: Sharpness::Sharp }
        }
        Family::RemainderHardy => {
            let value = ground_state_exponent(q, p(), inst.get("alpha")).powf(p());
            SharpConstant { value, sharpness: Sharpness::NotClaimedSharp }
        }
        Family::StabilityHardy => {
            let p = p();
            let cp = frs_constant(p).expect("admissible stability instance has p >= 2");
            SharpConstant { value: cp * ((p - 1.0) / p).powf(p), sharpness: Sharpness::NotClaimedSharp }
        }
        Family::CriticalLogHardy => {
            SharpConstant { value: p() / (inst.get("gamma") - 1.0), sharpness: Sharpness::Sharp }
        }
        Family::UncertaintyA | Family::UncertaintyB => {
            SharpConstant { value: (inst.get("gamma") - 1.0) / p(), sharpness: Sharpness::NotClaimedSharp }
        }
        Family::Superweight => {
            let value = superweight_base(inst) - inst.get("m");
            SharpConstant { value, sharpness: flag(value != 0.0) }
        }
        Family::SuperweightHigherOrder => {
            let base = superweight_base(inst);
            let (m, k) = (inst.get("m"), inst.get("k") as usize);
            let value = (0..k).map(|j| base - (m + j as f64)).product();
            SharpConstant { value, sharpness: Sharpness::NotClaimedSharp }
        }
    }
}

/// Validates the parameters, then returns [`sharp_constant`]. For the two extended CKN families
/// a wrong critical/non-critical branch is reported as [`CatalogError::BranchMismatch`].
pub fn sharp_constant_for(
    family: Family,
    params: &Params,
    setting: &HomogeneousSetting,
) -> Result<SharpConstant, CatalogError> {
    if matches!(family, Family::ExtendedCKN | Family::ExtendedCKNCritical) {
        let eff = effective_setting(params, setting)?;
        if let (Ok(p), Ok(a)) = (params.get("p"), params.get("a")) {
            let critical = is_critical_ckn(eff.q(), p, a);
            if critical && family == Family::ExtendedCKN {
                return Err(CatalogError::BranchMismatch { family, q: eff.q(), expected: "ExtendedCKNCritical" });
            }
            if !critical && family == Family::ExtendedCKNCritical {
                return Err(CatalogError::BranchMismatch { family, q: eff.q(), expected: "ExtendedCKN" });
            }
        }
    }
    let inst = InequalityInstance::new(family, params.clone(), *setting)?;
    Ok(sharp_constant(&inst))
}
