use super::constants::ground_state_exponent;
use super::evaluate::{log_ratio, require_compact, Ctx, Failure};
use super::remainder::hardy_deficit;
use super::report::{Direction, VerificationReport};
use super::{validate, CatalogError, Family, Params};
use crate::model::{Expr, HomogeneousSetting, RadialProfile, Support};
use crate::quadrature::{Measured, Tolerance};
use crate::sharpness::frs_constant;

const GRID_POINTS: usize = 16;

/// Sixteen log-spaced radii on `[r_min/2, 2 r_max]` of the profile's support.
pub fn default_r_grid(f: &RadialProfile) -> Result<Vec<f64>, CatalogError> {
    let (lo, hi) = match f.support() {
        Support::Compact { lo, hi } if lo > 0.0 => (lo / 2.0, hi * 2.0),
        _ => return Err(CatalogError::ProfileSupport),
    };
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..GRID_POINTS)
        .map(|i| (a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect())
}

/// `d_R(f, g) = (int |f - g|^p |log(R/r)|^(-p) r^(-(alpha+1) p))^(1/p)`.
pub fn stability_distance(
    f: &RadialProfile,
    g: &RadialProfile,
    big_r: f64,
    alpha: f64,
    p: f64,
    setting: &HomogeneousSetting,
) -> Result<f64, CatalogError> {
    if f == g {
        return Ok(0.0);
    }
    let mut ctx = Ctx::new(setting, Tolerance::from_env());
    let h = if g.is_identically_zero() { f.clone() } else { f.sub(g) };
    match distance_power(&mut ctx, &h, big_r, alpha, p) {
        Ok(m) => Ok(m.value.max(0.0).powf(1.0 / p)),
        Err(Failure::Quad(e)) => Err(e.into()),
        Err(Failure::Hard(e)) => Err(e),
        Err(Failure::NotConverged { value, error }) => Err(CatalogError::NotConverged { value, error }),
    }
}

/// `d_R^p` for a precomputed difference `h`.
fn distance_power(ctx: &mut Ctx<'_>, h: &RadialProfile, big_r: f64, alpha: f64, p: f64) -> Result<Measured, Failure> {
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Failure::Hard(CatalogError::Inadmissible {
            family: Family::StabilityHardy,
            failed: vec!["R > 0".into()],
        }));
    }
    ctx.integral(h, &log_ratio(-(alpha + 1.0), big_r, -1.0)?, p)
}

/// `f - c_f(R) f_alpha`, written as `f - f(R) (R/r)^kappa` so that it vanishes exactly at `R`.
pub(crate) fn extremal_difference(f: &RadialProfile, big_r: f64, kappa: f64) -> RadialProfile {
    let v = f.value(big_r);
    if v == 0.0 {
        return f.clone();
    }
    let ground = Expr::scale(v, Expr::pow(Expr::div(Expr::c(big_r), Expr::Var), kappa));
    f.sub(&RadialProfile::whole(ground))
}

/// `J(f) >= c_p ((p-1)/p)^p max_R d_R(f, c_f(R) f_alpha)^p` over the radii in `r_grid`.
pub fn stability_check(
    f: &RadialProfile,
    alpha: f64,
    p: f64,
    r_grid: &[f64],
    setting: &HomogeneousSetting,
) -> Result<VerificationReport, CatalogError> {
    stability_check_with(f, alpha, p, r_grid, setting, &Tolerance::from_env())
}

pub(crate) fn stability_check_with(
    f: &RadialProfile,
    alpha: f64,
    p: f64,
    r_grid: &[f64],
    setting: &HomogeneousSetting,
    tol: &Tolerance,
) -> Result<VerificationReport, CatalogError> {
    let params = Params { p: Some(p), alpha: Some(alpha), ..Default::default() };
    let verdict = validate(Family::StabilityHardy, &params, setting);
    if !verdict.admissible {
        return Err(CatalogError::Inadmissible { family: Family::StabilityHardy, failed: verdict.failed_conditions });
    }
    require_compact(f)?;
    if r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(CatalogError::Inadmissible {
            family: Family::StabilityHardy,
            failed: vec!["R grid of positive radii".into()],
        });
    }
    let constant = frs_constant(p)? * ((p - 1.0) / p).powf(p);
    let kappa = ground_state_exponent(setting.q(), p, alpha);
    let mut ctx = Ctx::new(setting, *tol);
    let sides = (|| {
        let j = hardy_deficit(&mut ctx, f, alpha, p)?;
        let mut best = (Measured::exact(0.0), f64::NAN);
        for &big_r in r_grid {
            let h = extremal_difference(f, big_r, kappa);
            let d = distance_power(&mut ctx, &h, big_r, alpha, p)?;
            if d.value > best.0.value || best.1.is_nan() {
                best = (d, big_r);
            }
        }
        ctx.trace.notes.push(format!("largest distance term at R = {}", best.1));
        Ok((j, best.0))
    })();
    ctx.finish(Family::StabilityHardy, Direction::GreaterEq, constant, sides)
}
