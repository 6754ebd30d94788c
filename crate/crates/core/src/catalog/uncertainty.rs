use serde::{Deserialize, Serialize};

use super::evaluate::{log_ratio, minus_value_at, pw, require_compact, Ctx};
use super::report::{Direction, VerificationReport};
use super::{validate, CatalogError, Family, Params};
use crate::model::{HomogeneousSetting, RadialProfile};
use crate::quadrature::Tolerance;

/// The two uncertainty principles derived from the critical logarithmic Hardy inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UncertaintyVariant {
    /// `||f'||_(p, log) ||f||_q >= (gamma-1)/p ||f (f - f_R)||_(2, log)` with `1/p + 1/q = 1/2`.
    A { q: f64 },
    /// `||f'||_(p, log) ||f - f_R||_(p', log) >= (gamma-1)/p ||f - f_R||_(2, log)^2` with
    /// `1/p + 1/p' = 1`.
    B { p_prime: f64 },
}

impl UncertaintyVariant {
    pub fn family(&self) -> Family {
        match self {
            UncertaintyVariant::A { .. } => Family::UncertaintyA,
            UncertaintyVariant::B { .. } => Family::UncertaintyB,
        }
    }
}

const REL_TOL: f64 = 1e-12;

fn check_relation(variant: UncertaintyVariant, p: f64) -> Result<(), CatalogError> {
    match variant {
        UncertaintyVariant::A { q } => {
            if p <= 2.0 {
                return Err(CatalogError::ExponentRelation(format!(
                    "1/p + 1/q = 1/2 has no finite q > 1 for p = {p}"
                )));
            }
            if !(q > 1.0 && (1.0 / p + 1.0 / q - 0.5).abs() <= REL_TOL) {
                return Err(CatalogError::ExponentRelation(format!("1/p + 1/q = 1/2 fails for p = {p}, q = {q}")));
            }
        }
        UncertaintyVariant::B { p_prime } => {
            if !(p_prime > 1.0 && (1.0 / p + 1.0 / p_prime - 1.0).abs() <= REL_TOL) {
                return Err(CatalogError::ExponentRelation(format!(
                    "1/p + 1/p' = 1 fails for p = {p}, p' = {p_prime}"
                )));
            }
        }
    }
    Ok(())
}

pub fn uncertainty_check(
    variant: UncertaintyVariant,
    p: f64,
    gamma: f64,
    big_r: f64,
    f: &RadialProfile,
    setting: &HomogeneousSetting,
) -> Result<VerificationReport, CatalogError> {
    uncertainty_check_with(variant, p, gamma, big_r, f, setting, &Tolerance::from_env())
}

pub(crate) fn uncertainty_check_with(
    variant: UncertaintyVariant,
    p: f64,
    gamma: f64,
    big_r: f64,
    f: &RadialProfile,
    setting: &HomogeneousSetting,
    tol: &Tolerance,
) -> Result<VerificationReport, CatalogError> {
    check_relation(variant, p)?;
    let params = Params { p: Some(p), gamma: Some(gamma), big_r: Some(big_r), ..Default::default() };
    let verdict = validate(Family::CriticalLogHardy, &params, setting);
    if !verdict.admissible {
        return Err(CatalogError::Inadmissible { family: variant.family(), failed: verdict.failed_conditions });
    }
    require_compact(f)?;
    let q_dim = setting.q();
    let mut ctx = Ctx::new(setting, *tol);
    let sides = (|| {
        let h = minus_value_at(f, big_r);
        let grad = ctx.norm(&f.derivative(1)?, &log_ratio(-(q_dim - p) / p, big_r, (p - gamma) / p)?, p)?;
        match variant {
            UncertaintyVariant::A { q } => {
                let plain = ctx.norm(f, &pw(0.0), q)?;
                let rhs = ctx.norm(&f.mul(&h), &log_ratio(-q_dim / p, big_r, -gamma / p)?, 2.0)?;
                Ok((grad.mul(plain), rhs))
            }
            UncertaintyVariant::B { p_prime } => {
                let dual = ctx.norm(&h, &log_ratio(-q_dim / p_prime, big_r, -(2.0 - gamma / p))?, p_prime)?;
                let rhs = ctx.norm(&h, &log_ratio(-q_dim / 2.0, big_r, -1.0)?, 2.0)?;
                Ok((grad.mul(dual), rhs.mul(rhs)))
            }
        }
    })();
    ctx.finish(variant.family(), Direction::GreaterEq, (gamma - 1.0) / p, sides)
}
