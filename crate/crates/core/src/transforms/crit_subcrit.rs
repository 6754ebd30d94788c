use serde::Serialize;

use super::TransformError;
use crate::catalog::evaluate::{log_ratio, pw, Ctx, Failure};
use crate::catalog::Verdict;
use crate::model::{Expr, HomogeneousSetting, RadialProfile, Support};
use crate::quadrature::{Measured, Tolerance};

/// Dimensions and surface measures of the critical (`Q`) and subcritical (`m`) sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CritSubcritContext {
    q: f64,
    m: f64,
    big_r: f64,
    sigma_q: f64,
    sigma_m: f64,
}

impl CritSubcritContext {
    pub fn new(q: f64, m: f64, big_r: f64, sigma_q: f64, sigma_m: f64) -> Result<Self, TransformError> {
        let finite = [q, m, big_r, sigma_q, sigma_m].iter().all(|v| v.is_finite());
        if !(finite && m >= 2.0 && q >= m + 1.0 && big_r > 0.0 && sigma_q > 0.0 && sigma_m > 0.0) {
            return Err(TransformError::InvalidParameters(format!(
                "need m >= 2, Q >= m + 1, R > 0 and positive surface measures (Q = {q}, m = {m}, R = {big_r})"
            )));
        }
        Ok(Self { q, m, big_r, sigma_q, sigma_m })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    /// `(Q - m)/(m - 1)`.
    pub fn kappa(&self) -> f64 {
        (self.q - self.m) / (self.m - 1.0)
    }

    /// `s(r) = R exp(1 - r^(-kappa))`.
    pub fn radius_map(&self, r: f64) -> f64 {
        self.big_r * (1.0 - r.powf(-self.kappa())).exp()
    }

    /// Inverse of [`radius_map`](Self::radius_map): `r(s) = (1 - log(s/R))^(-1/kappa)`.
    pub fn inverse_radius_map(&self, s: f64) -> f64 {
        (1.0 - (s / self.big_r).ln()).powf(-1.0 / self.kappa())
    }

    fn radius_expr(&self) -> Expr {
        let inner = Expr::sub(Expr::c(1.0), Expr::power_of_r(-self.kappa()));
        Expr::scale(self.big_r, Expr::exp(inner))
    }
}

const SIGN_SAMPLES: usize = 1000;

fn check_input(g: &RadialProfile, ctx: &CritSubcritContext) -> Result<(f64, f64), TransformError> {
    let (lo, hi) = match g.support() {
        Support::Compact { lo, hi } if lo > 0.0 && hi < ctx.big_r => (lo, hi),
        Support::Compact { lo, hi } => return Err(TransformError::SupportTouchesBoundary { lo, hi, limit: ctx.big_r }),
        Support::Whole => {
            return Err(TransformError::SupportTouchesBoundary { lo: 0.0, hi: f64::INFINITY, limit: ctx.big_r })
        }
    };
    let samples = (0..=SIGN_SAMPLES).map(|i| lo + (hi - lo) * i as f64 / SIGN_SAMPLES as f64);
    for r in samples.chain(g.breakpoints().iter().copied()) {
        let v = g.value(r);
        if v < 0.0 {
            return Err(TransformError::SignedProfile { radius: r, value: v });
        }
    }
    Ok((lo, hi))
}

/// `f(r) = g(s(r))` as an exact composition on `(0, 1)`.
pub fn crit_subcrit_map(g: &RadialProfile, ctx: &CritSubcritContext) -> Result<RadialProfile, TransformError> {
    if g.is_identically_zero() {
        return Ok(RadialProfile::zero());
    }
    let (lo, hi) = check_input(g, ctx)?;
    let support = Support::Compact { lo: ctx.inverse_radius_map(lo), hi: ctx.inverse_radius_map(hi) };
    let breaks = g.breakpoints().iter().map(|b| ctx.inverse_radius_map(*b)).collect();
    Ok(g.compose(&ctx.radius_expr(), support, breaks)?)
}

/// Both sides of an identity and their relative gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1e-30)`.
    pub relative_gap: f64,
    /// Holds when the gap is within the requested tolerance.
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

const GAP_FLOOR: f64 = 1e-30;

/// Evaluates the critical functional of `f = g o s` in dimension `Q` and the scaled subcritical
/// log functional of `g` in dimension `m`, with `m` as the integrability exponent.
pub fn crit_subcrit_identity_check(
    g: &RadialProfile,
    ctx: &CritSubcritContext,
    gap_tol: f64,
) -> Result<EqualityReport, TransformError> {
    crit_subcrit_identity_check_with(g, ctx, gap_tol, &Tolerance::from_env())
}

/// [`crit_subcrit_identity_check`] with an explicit quadrature tolerance.
pub fn crit_subcrit_identity_check_with(
    g: &RadialProfile,
    ctx: &CritSubcritContext,
    gap_tol: f64,
    tol: &Tolerance,
) -> Result<EqualityReport, TransformError> {
    let f = crit_subcrit_map(g, ctx)?;
    let m = ctx.m;
    let crit = HomogeneousSetting::with_sigma(ctx.q, ctx.sigma_q)?;
    let sub = HomogeneousSetting::with_sigma(m, ctx.sigma_m)?;
    let tol = *tol;
    let mut left = Ctx::new(&crit, tol);
    let lhs = (|| -> Result<Measured, Failure> {
        let grad = left.integral(&f.derivative(1)?, &pw(0.0), m)?;
        let plain = left.integral(&f, &pw(-1.0), m)?;
        Ok(grad.sub(plain.scale(((ctx.q - m) / m).powf(m))))
    })();
    let mut right = Ctx::new(&sub, tol);
    let rhs = (|| -> Result<Measured, Failure> {
        let grad = right.integral(&g.derivative(1)?, &pw(0.0), m)?;
        let plain = right.integral(g, &log_ratio(-1.0, ctx.big_r * std::f64::consts::E, -1.0)?, m)?;
        let inner = grad.sub(plain.scale(((m - 1.0) / m).powf(m)));
        Ok(inner.scale(ctx.sigma_q / ctx.sigma_m * ctx.kappa().powf(m - 1.0)))
    })();
    match (lhs, rhs) {
        (Ok(l), Ok(r)) => {
            let gap = (l.value - r.value).abs() / l.value.abs().max(r.value.abs()).max(GAP_FLOOR);
            Ok(EqualityReport {
                lhs: l.value,
                rhs: r.value,
                lhs_error: l.err,
                rhs_error: r.err,
                relative_gap: gap,
                verdict: if gap <= gap_tol { Verdict::Holds } else { Verdict::Violated },
                notes: Vec::new(),
            })
        }
        (l, r) => {
            let mut notes = Vec::new();
            for side in [l, r] {
                match side {
                    Err(Failure::Hard(e)) => return Err(e.into()),
                    Err(Failure::Quad(e)) => notes.push(format!("quadrature: {e}")),
                    Err(Failure::NotConverged { value, error }) => {
                        notes.push(format!("quadrature did not converge: value {value}, error estimate {error}"))
                    }
                    Ok(_) => {}
                }
            }
            Ok(EqualityReport {
                lhs: f64::NAN,
                rhs: f64::NAN,
                lhs_error: f64::NAN,
                rhs_error: f64::NAN,
                relative_gap: f64::NAN,
                verdict: Verdict::Inconclusive,
                notes,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_map_properties() {
        let ctx = CritSubcritContext::new(3.0, 2.0, 1.5, 1.0, 1.0).unwrap();
        assert_eq!(ctx.radius_map(1.0), 1.5);
        assert!(ctx.radius_map(0.3) < ctx.radius_map(0.6));
        let r: f64 = 0.4;
        assert!((ctx.radius_map(r) - 1.5 * (1.0 - 1.0 / r).exp()).abs() < 1e-15);
        assert!(CritSubcritContext::new(2.5, 2.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn map_then_inverse_recovers_g() {
        let ctx = CritSubcritContext::new(5.0, 3.0, 2.0, 1.0, 1.0).unwrap();
        let g = RadialProfile::bump(0.5, 1.0).unwrap();
        let f = crit_subcrit_map(&g, &ctx).unwrap();
        for i in 1..50 {
            let s = 0.5 + 0.5 * i as f64 / 50.0;
            let back = f.value(ctx.inverse_radius_map(s));
            assert!((back - g.value(s)).abs() < 1e-12, "{s}: {back} vs {}", g.value(s));
        }
    }

    #[test]
    fn zero_profile() {
        let ctx = CritSubcritContext::new(3.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        let rep = crit_subcrit_identity_check(&RadialProfile::zero(), &ctx, 1e-8).unwrap();
        assert_eq!((rep.lhs, rep.rhs, rep.relative_gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn identity_on_bump() {
        let ctx = CritSubcritContext::new(3.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        let g = RadialProfile::bump(0.25, 0.5).unwrap();
        let rep = crit_subcrit_identity_check(&g, &ctx, 1e-8).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds, "{rep:?}");
        let doubled = CritSubcritContext::new(3.0, 2.0, 1.0, 2.0, 1.0).unwrap();
        let rep2 = crit_subcrit_identity_check(&g, &doubled, 1e-8).unwrap();
        assert!((rep2.lhs - 2.0 * rep.lhs).abs() < 1e-9 * rep.lhs.abs());
        assert!((rep2.relative_gap - rep.relative_gap).abs() < 1e-8);
    }

    #[test]
    fn identity_higher_dimension() {
        let ctx = CritSubcritContext::new(5.0, 3.0, 2.0, 1.0, 1.0).unwrap();
        let g = RadialProfile::bump(0.4, 1.6).unwrap().add(&RadialProfile::bump(0.8, 1.2).unwrap());
        let rep = crit_subcrit_identity_check(&g, &ctx, 1e-8).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds, "{rep:?}");
        assert!(rep.lhs > 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let ctx = CritSubcritContext::new(3.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        let touching = RadialProfile::bump(0.5, 1.0).unwrap();
        assert!(matches!(crit_subcrit_map(&touching, &ctx), Err(TransformError::SupportTouchesBoundary { .. })));
        let signed = RadialProfile::bump(0.25, 0.5).unwrap().scale(-1.0);
        assert!(matches!(crit_subcrit_map(&signed, &ctx), Err(TransformError::SignedProfile { .. })));
    }
}
