use serde::Serialize;

use super::constants::ground_state_exponent;
use super::evaluate::{pw, require_compact, Ctx, Failure};
use super::report::{Direction, VerificationReport};
use super::{validate, CatalogError, Family, Params};
use crate::model::{HomogeneousSetting, RadialProfile};
use crate::quadrature::{Measured, Tolerance};
use crate::sharpness::frs_constant;

/// The remainder constant and the two exponents of the remainder term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderQuantities {
    pub c_p: f64,
    pub delta1: f64,
    pub delta2: f64,
}

fn check(p: f64, alpha: f64, b: f64, setting: &HomogeneousSetting) -> Result<(), CatalogError> {
    let params = Params { p: Some(p), alpha: Some(alpha), b: Some(b), ..Default::default() };
    let verdict = validate(Family::RemainderHardy, &params, setting);
    if verdict.admissible {
        Ok(())
    } else {
        Err(CatalogError::Inadmissible { family: Family::RemainderHardy, failed: verdict.failed_conditions })
    }
}

pub fn remainder_quantities(
    p: f64,
    alpha: f64,
    b: f64,
    setting: &HomogeneousSetting,
) -> Result<RemainderQuantities, CatalogError> {
    check(p, alpha, b, setting)?;
    let q = setting.q();
    let (x, y) = (q * (p - 1.0), p * b);
    // b = Q(p-1)/p must give exactly 0 even when the product rounds differently
    let num = if (x - y).abs() <= 8.0 * f64::EPSILON * x.abs().max(y.abs()) { 0.0 } else { x - y };
    let c_p = frs_constant(p)? * (num / (p * p)).abs().powf(p);
    let base = q - p - alpha * p;
    Ok(RemainderQuantities { c_p, delta1: base - (q + p * b) / p, delta2: base - b * p / (p - 1.0) })
}

/// `J(f) >= C_p (int |f|^p r^delta1)^p / (int |f|^p r^delta2)^(p-1)`, where `J(f)` is the
/// Hardy deficit `int |f'|^p r^(-alpha p) - kappa^p int |f|^p r^(-(alpha+1) p)`.
pub fn remainder_check(
    p: f64,
    alpha: f64,
    b: f64,
    f: &RadialProfile,
    setting: &HomogeneousSetting,
) -> Result<VerificationReport, CatalogError> {
    remainder_check_with(p, alpha, b, f, setting, &Tolerance::from_env())
}

pub(crate) fn remainder_check_with(
    p: f64,
    alpha: f64,
    b: f64,
    f: &RadialProfile,
    setting: &HomogeneousSetting,
    tol: &Tolerance,
) -> Result<VerificationReport, CatalogError> {
    let rq = remainder_quantities(p, alpha, b, setting)?;
    require_compact(f)?;
    let mut ctx = Ctx::new(setting, *tol);
    let sides = (|| {
        let j = hardy_deficit(&mut ctx, f, alpha, p)?;
        if rq.c_p == 0.0 {
            return Ok((j, Measured::exact(0.0)));
        }
        let x = ctx.integral(f, &pw(rq.delta1 / p), p)?;
        let y = ctx.integral(f, &pw(rq.delta2 / p), p)?;
        Ok((j, x.powf(p).div(y.powf(p - 1.0)).scale(rq.c_p)))
    })();
    ctx.finish(Family::RemainderHardy, Direction::GreaterEq, 1.0, sides)
}

/// `int |f'|^p r^(-alpha p) - ((Q - p - alpha p)/p)^p int |f|^p r^(-(alpha+1) p)`.
pub(crate) fn hardy_deficit(ctx: &mut Ctx<'_>, f: &RadialProfile, alpha: f64, p: f64) -> Result<Measured, Failure> {
    let kappa = ground_state_exponent(ctx.setting.q(), p, alpha);
    let grad = ctx.integral(&f.derivative(1)?, &pw(-alpha), p)?;
    let plain = ctx.integral(f, &pw(-(alpha + 1.0)), p)?;
    Ok(grad.sub(plain.scale(kappa.powf(p))))
}
