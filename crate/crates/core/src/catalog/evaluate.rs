use super::constants::sharp_constant;
use super::report::{Direction, Trace, VerificationReport};
use super::{remainder, stability, uncertainty, CatalogError, Family, InequalityInstance};
use crate::model::{HomogeneousSetting, LogKind, RadialProfile, Superweight, Support, WeightSpec};
use crate::quadrature::{lp_radial_norm, weighted_integral, Measured, QuadError, Tolerance};

/// Why a side could not be computed; turned into an inconclusive report.
#[derive(Debug)]
pub(crate) enum Failure {
    Quad(QuadError),
    NotConverged { value: f64, error: f64 },
    Hard(CatalogError),
}

impl From<QuadError> for Failure {
    fn from(e: QuadError) -> Self {
        Failure::Quad(e)
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        Failure::Hard(e)
    }
}

impl From<crate::model::ModelError> for Failure {
    fn from(e: crate::model::ModelError) -> Self {
        Failure::Hard(e.into())
    }
}

/// Integration context shared by all evaluators.
pub(crate) struct Ctx<'a> {
    pub setting: &'a HomogeneousSetting,
    pub tol: Tolerance,
    pub trace: Trace,
}

impl<'a> Ctx<'a> {
    pub fn new(setting: &'a HomogeneousSetting, tol: Tolerance) -> Self {
        Self { setting, tol, trace: Trace::default() }
    }

    /// `int |w h|^s` over the group.
    pub fn integral(&mut self, h: &RadialProfile, w: &WeightSpec, s: f64) -> Result<Measured, Failure> {
        let res = weighted_integral(h, w, s, self.setting, &self.tol)?;
        self.trace.errors.push(res.abs_error);
        self.trace.fragile |= res.fragile;
        if !res.converged {
            return Err(Failure::NotConverged { value: res.value, error: res.abs_error });
        }
        Ok(res.measured())
    }

    /// `(int |w h|^p)^(1/p)`.
    pub fn norm(&mut self, h: &RadialProfile, w: &WeightSpec, p: f64) -> Result<Measured, Failure> {
        let res = lp_radial_norm(h, w, p, self.setting, &self.tol)?;
        self.trace.errors.push(res.integral.abs_error);
        self.trace.fragile |= res.integral.fragile;
        if !res.integral.converged {
            return Err(Failure::NotConverged { value: res.integral.value, error: res.integral.abs_error });
        }
        Ok(res.measured())
    }

    /// Builds the report, or an inconclusive one when a side failed.
    pub fn finish(
        self,
        family: Family,
        direction: Direction,
        constant: f64,
        sides: Result<(Measured, Measured), Failure>,
    ) -> Result<VerificationReport, CatalogError> {
        match sides {
            Ok((lhs, rhs)) => Ok(VerificationReport::from_sides(family, direction, lhs, rhs, constant, self.trace)),
            Err(Failure::Hard(e)) => Err(e),
            Err(Failure::Quad(e)) => {
                Ok(VerificationReport::inconclusive(family, direction, constant, self.trace, format!("quadrature: {e}")))
            }
            Err(Failure::NotConverged { value, error }) => Ok(VerificationReport::inconclusive(
                family,
                direction,
                constant,
                self.trace,
                format!("quadrature did not converge: value {value}, error estimate {error}"),
            )),
        }
    }
}

pub(crate) fn require_compact(f: &RadialProfile) -> Result<(), CatalogError> {
    match f.support() {
        Support::Compact { .. } => Ok(()),
        Support::Whole => Err(CatalogError::ProfileSupport),
    }
}

pub(crate) fn pw(power: f64) -> WeightSpec {
    WeightSpec::power(power)
}

pub(crate) fn log_ratio(power: f64, radius: f64, exponent: f64) -> Result<WeightSpec, Failure> {
    Ok(pw(power).with_log(LogKind::LogRatio { radius }, exponent)?)
}

/// `f - f(R)` with the constant subtracted symbolically; `f` itself when `f(R) = 0`.
pub(crate) fn minus_value_at(f: &RadialProfile, big_r: f64) -> RadialProfile {
    let v = f.value(big_r);
    if v == 0.0 {
        f.clone()
    } else {
        f.sub(&RadialProfile::whole(crate::model::Expr::c(v)))
    }
}

/// Evaluates both sides of the instance's inequality on `f`, with the tolerance from the
/// environment.
pub fn evaluate_sides(inst: &InequalityInstance, f: &RadialProfile) -> Result<VerificationReport, CatalogError> {
    evaluate_sides_with(inst, f, &Tolerance::from_env())
}

pub fn evaluate_sides_with(
    inst: &InequalityInstance,
    f: &RadialProfile,
    tol: &Tolerance,
) -> Result<VerificationReport, CatalogError> {
    require_compact(f)?;
    let setting = inst.setting();
    let q_dim = setting.q();
    let family = inst.family();
    match family {
        Family::RemainderHardy => {
            return remainder::remainder_check_with(inst.get("p"), inst.get("alpha"), inst.get("b"), f, setting, tol)
        }
        Family::StabilityHardy => {
            let grid = stability::default_r_grid(f)?;
            return stability::stability_check_with(f, inst.get("alpha"), inst.get("p"), &grid, setting, tol);
        }
        Family::UncertaintyA | Family::UncertaintyB => {
            let variant = if family == Family::UncertaintyA {
                uncertainty::UncertaintyVariant::A { q: inst.get("q") }
            } else {
                let p = inst.get("p");
                uncertainty::UncertaintyVariant::B { p_prime: inst.params().q.unwrap_or(p / (p - 1.0)) }
            };
            return uncertainty::uncertainty_check_with(
                variant,
                inst.get("p"),
                inst.get("gamma"),
                inst.get("R"),
                f,
                setting,
                tol,
            );
        }
        Family::CriticalLogHardy => {
            return critical_log_hardy(f, inst.get("p"), inst.get("gamma"), inst.get("R"), setting, tol)
        }
        _ => {}
    }
    let constant = sharp_constant(inst).value;
    let mut ctx = Ctx::new(setting, *tol);
    let direction = match family {
        Family::AnisotropicCKN | Family::Superweight | Family::SuperweightHigherOrder => Direction::GreaterEq,
        _ => Direction::LessEq,
    };
    let sides = (|| -> Result<(Measured, Measured), Failure> {
        let p = inst.get("p");
        match family {
            Family::ExtendedCKN | Family::ExtendedCKNCritical => {
                let (q, r, delta, a, b) = (inst.get("q"), inst.get("r"), inst.get("delta"), inst.get("a"), inst.get("b"));
                let c = inst.params().c.unwrap_or(delta * (a - 1.0) + b * (1.0 - delta));
                let lhs = ctx.norm(f, &pw(c), r)?;
                let mut rhs = Measured::exact(1.0);
                if delta > 0.0 {
                    let mut w = pw(a);
                    if family == Family::ExtendedCKNCritical {
                        w = w.with_log(LogKind::AbsLog, 1.0)?;
                    }
                    rhs = rhs.mul(ctx.norm(&f.derivative(1)?, &w, p)?.powf(delta));
                }
                if delta < 1.0 {
                    rhs = rhs.mul(ctx.norm(f, &pw(b), q)?.powf(1.0 - delta));
                }
                Ok((lhs, rhs))
            }
            Family::EulerHardy => {
                let w = pw(-inst.get("alpha"));
                Ok((ctx.norm(f, &w, p)?, ctx.norm(&f.euler(), &w, p)?))
            }
            Family::EulerHardyCritical => {
                let w = pw(-q_dim / p);
                let wl = w.with_log(LogKind::AbsLog, 1.0)?;
                Ok((ctx.norm(f, &w, p)?, ctx.norm(&f.euler(), &wl, p)?))
            }
            Family::AnisotropicCKN => {
                let (a, b) = (inst.get("a"), inst.get("b"));
                let d = ctx.norm(&f.derivative(1)?, &pw(-a), p)?;
                let g = ctx.norm(f, &pw(-b / (p - 1.0)), p)?;
                let rhs = ctx.integral(f, &pw(-(a + b + 1.0) / p), p)?;
                Ok((d.mul(g.powf(p - 1.0)), rhs))
            }
            Family::Superweight | Family::SuperweightHigherOrder => {
                let sw = Superweight::new(inst.get("a"), inst.get("b"), inst.get("alpha"), inst.get("beta"))?;
                let m = inst.get("m");
                let k = if family == Family::Superweight { 1 } else { inst.get("k") as usize };
                let lhs = ctx.norm(&f.derivative(k)?, &pw(-m).with_superweight(sw), p)?;
                let rhs = ctx.norm(f, &pw(-(m + k as f64)).with_superweight(sw), p)?;
                Ok((lhs, rhs))
            }
            _ => unreachable!("handled above"),
        }
    })();
    ctx.finish(family, direction, constant, sides)
}

/// Critical logarithmic Hardy inequality for general `gamma`.
fn critical_log_hardy(
    f: &RadialProfile,
    p: f64,
    gamma: f64,
    big_r: f64,
    setting: &HomogeneousSetting,
    tol: &Tolerance,
) -> Result<VerificationReport, CatalogError> {
    let q = setting.q();
    let mut ctx = Ctx::new(setting, *tol);
    let sides = (|| {
        let h = minus_value_at(f, big_r);
        let lhs = ctx.norm(&h, &log_ratio(-q / p, big_r, -gamma / p)?, p)?;
        let rhs = ctx.norm(&f.derivative(1)?, &log_ratio(-(q - p) / p, big_r, (p - gamma) / p)?, p)?;
        Ok((lhs, rhs))
    })();
    ctx.finish(Family::CriticalLogHardy, Direction::LessEq, p / (gamma - 1.0), sides)
}

/// The `gamma = p` case of the critical logarithmic Hardy inequality, written with its own
/// weights `r^(-Q/p) |log(R/r)|^(-1)` and `r^((p-Q)/p)` and constant `p/(p-1)`.
pub fn log_hardy_gamma_p_sides(
    f: &RadialProfile,
    p: f64,
    big_r: f64,
    setting: &HomogeneousSetting,
    tol: &Tolerance,
) -> Result<VerificationReport, CatalogError> {
    require_compact(f)?;
    let q = setting.q();
    let mut ctx = Ctx::new(setting, *tol);
    let sides = (|| {
        let h = minus_value_at(f, big_r);
        let lhs = ctx.norm(&h, &log_ratio(-q / p, big_r, -1.0)?, p)?;
        let rhs = ctx.norm(&f.derivative(1)?, &pw((p - q) / p), p)?;
        Ok((lhs, rhs))
    })();
    ctx.finish(Family::CriticalLogHardy, Direction::LessEq, p / (p - 1.0), sides)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Params, Verdict};

    fn inst(family: Family, params: Params, q: f64) -> InequalityInstance {
        InequalityInstance::new(family, params, HomogeneousSetting::new(q).unwrap()).unwrap()
    }

    #[test]
    fn zero_profile_holds_everywhere() {
        let eh = inst(Family::EulerHardy, Params { p: Some(2.0), alpha: Some(0.0), ..Default::default() }, 3.0);
        let rep = evaluate_sides(&eh, &RadialProfile::zero()).unwrap();
        assert_eq!((rep.lhs, rep.rhs, rep.ratio), (0.0, 0.0, 0.0));
        assert_eq!(rep.verdict, Verdict::Holds);
    }

    #[test]
    fn euler_hardy_on_bump() {
        let eh = inst(Family::EulerHardy, Params { p: Some(2.0), alpha: Some(0.0), ..Default::default() }, 3.0);
        let rep = evaluate_sides(&eh, &RadialProfile::bump(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(rep.margin > 0.0);
        assert!(rep.ratio < 1.0);
    }

    #[test]
    fn log_hardy_matches_gamma_p_path() {
        let params = Params { p: Some(2.0), gamma: Some(2.0), big_r: Some(1.0), ..Default::default() };
        let clh = inst(Family::CriticalLogHardy, params, 3.0);
        let f = RadialProfile::bump(0.25, 0.5).unwrap();
        let tol = Tolerance::default();
        let general = evaluate_sides_with(&clh, &f, &tol).unwrap();
        let special = log_hardy_gamma_p_sides(&f, 2.0, 1.0, clh.setting(), &tol).unwrap();
        assert_eq!(general.verdict, Verdict::Holds);
        assert_eq!(general, special);
    }

    #[test]
    fn log_hardy_profile_straddling_r() {
        let params = Params { p: Some(3.0), gamma: Some(2.5), big_r: Some(1.5), ..Default::default() };
        let clh = inst(Family::CriticalLogHardy, params, 4.0);
        let rep = evaluate_sides(&clh, &RadialProfile::bump(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds, "{rep:?}");
        assert!(rep.lhs > 0.0 && rep.ratio < 1.0);
    }

    #[test]
    fn ckn_delta_zero_is_an_identity() {
        let params = Params {
            p: Some(2.0),
            q: Some(3.0),
            r: Some(3.0),
            delta: Some(0.0),
            a: Some(0.3),
            b: Some(-0.4),
            ..Default::default()
        };
        let ckn = inst(Family::ExtendedCKN, params, 4.0);
        let rep = evaluate_sides(&ckn, &RadialProfile::bump(1.0, 3.0).unwrap()).unwrap();
        assert_eq!(rep.constant, 1.0);
        assert_eq!(rep.lhs, rep.rhs);
        assert_eq!(rep.verdict, Verdict::Holds);
    }

    #[test]
    fn superweight_orientation() {
        let params = Params {
            p: Some(2.0),
            a: Some(1.0),
            b: Some(2.0),
            alpha: Some(1.5),
            beta: Some(0.5),
            m: Some(0.5),
            ..Default::default()
        };
        let sw = inst(Family::Superweight, params, 5.0);
        let rep = evaluate_sides(&sw, &RadialProfile::bump(0.5, 2.0).unwrap()).unwrap();
        assert_eq!(rep.direction, Direction::GreaterEq);
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(rep.ratio < 1.0);
    }

    #[test]
    fn whole_line_profile_rejected() {
        let eh = inst(Family::EulerHardy, Params { p: Some(2.0), alpha: Some(0.0), ..Default::default() }, 3.0);
        let f = RadialProfile::whole(crate::model::Expr::c(1.0));
        assert!(matches!(evaluate_sides(&eh, &f), Err(CatalogError::ProfileSupport)));
    }
}
