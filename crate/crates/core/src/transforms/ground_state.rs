use super::TransformError;
use crate::catalog::evaluate::{pw, require_compact, Ctx};
use crate::catalog::remainder::hardy_deficit;
use crate::catalog::report::{Direction, VerificationReport};
use crate::catalog::{validate, CatalogError, Family, Params};
use crate::model::{Expr, HomogeneousSetting, RadialProfile};
use crate::quadrature::Tolerance;
use crate::sharpness::frs_constant;

fn kappa(alpha: f64, p: f64, setting: &HomogeneousSetting) -> Result<f64, TransformError> {
    let q = setting.q();
    if !(alpha < (q - p) / p) {
        return Err(TransformError::InvalidParameters(format!("need alpha < (Q-p)/p, got alpha = {alpha}")));
    }
    Ok((q - p - alpha * p) / p)
}

/// `g(r) = r^((Q - p - alpha p)/p) f(r)`.
pub fn ground_state(
    f: &RadialProfile,
    alpha: f64,
    p: f64,
    setting: &HomogeneousSetting,
) -> Result<RadialProfile, TransformError> {
    let k = kappa(alpha, p, setting)?;
    Ok(f.times_expr(Expr::power_of_r(k)))
}

/// `J(f) >= c_p sigma int |g'|^p r^(p-1) dr` with `g` the ground-state transform of `f`.
pub fn ground_state_lower_bound_check(
    f: &RadialProfile,
    alpha: f64,
    p: f64,
    setting: &HomogeneousSetting,
) -> Result<VerificationReport, TransformError> {
    let params = Params { p: Some(p), alpha: Some(alpha), ..Default::default() };
    let verdict = validate(Family::StabilityHardy, &params, setting);
    if !verdict.admissible {
        return Err(CatalogError::Inadmissible { family: Family::RemainderHardy, failed: verdict.failed_conditions }.into());
    }
    require_compact(f)?;
    let g = ground_state(f, alpha, p, setting)?;
    let c_p = frs_constant(p).map_err(CatalogError::from)?;
    let mut ctx = Ctx::new(setting, Tolerance::from_env());
    let q = setting.q();
    let sides = (|| {
        let j = hardy_deficit(&mut ctx, f, alpha, p)?;
        let grad = ctx.integral(&g.derivative(1)?, &pw((p - q) / p), p)?;
        Ok((j, grad))
    })();
    let mut rep = ctx.finish(Family::RemainderHardy, Direction::GreaterEq, c_p, sides)?;
    rep.notes.push("ground-state lower bound".into());
    Ok(rep)
}
