use serde::Serialize;

use super::SharpnessError;
use crate::model::{Expr, HomogeneousSetting, LogKind, RadialProfile, Support, WeightSpec};
use crate::quadrature::{integrate_fn, weighted_integral, SingularityAnnotation, Tolerance};

/// Which end of a truncation window stays fixed as the window widens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// Window `[x/H, x H]`.
    Center,
    /// Window `[x/H^2, x]`.
    Upper,
    /// Window `[x, x H^2]`.
    Lower,
}

/// Relative width of each smooth transition, as a fraction of the window length in the slow
/// variable.
pub const TRANSITION_FRACTION: f64 = 0.1;

/// A sequence of test profiles indexed by a real parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtremizerFamily {
    /// Three-piece profile: `(log kR)^e` on `[0, 1/k]`, `(log(R/r))^e` on `[1/k, R/2]`, a linear
    /// ramp to 0 on `[R/2, R]`, with `e = (gamma-1)/p`. Indexed by `k`.
    LogHardyFk { gamma: f64, p: f64, big_r: f64 },
    /// `r^C` with smooth cutoffs in `log r`; index `j` gives the half-width `H = 10^j`.
    TruncatedPower { exponent: f64, anchor_radius: f64, anchor: Anchor },
    /// `(log r)^C` with smooth cutoffs in `log log r` on `log r in [10^-j, 10^j]`.
    TruncatedLogPower { exponent: f64 },
}

/// The log-Hardy family for `(gamma, p, R)`.
pub fn log_hardy_family(gamma: f64, p: f64, big_r: f64) -> Result<ExtremizerFamily, SharpnessError> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(SharpnessError::InvalidParameters(format!("need 1 < gamma < inf, got {gamma}")));
    }
    if !(p > 1f64.max(gamma - 1.0) && p.is_finite()) {
        return Err(SharpnessError::InvalidParameters(format!("need max(1, gamma-1) < p < inf, got p = {p}")));
    }
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(SharpnessError::InvalidParameters(format!("need R > 0, got {big_r}")));
    }
    Ok(ExtremizerFamily::LogHardyFk { gamma, p, big_r })
}

/// Smooth window `1` on `[t0 + tau, t1 - tau]`, `0` outside `[t0, t1]`, in the variable `t`.
fn window(t: Expr, t0: f64, t1: f64) -> Expr {
    let tau = TRANSITION_FRACTION * (t1 - t0);
    Expr::mul(vec![
        Expr::step(t.clone(), t0, t0 + tau),
        Expr::sub(Expr::c(1.0), Expr::step(t, t1 - tau, t1)),
    ])
}

impl ExtremizerFamily {
    /// The profile at the given index.
    pub fn profile(&self, index: f64) -> Result<RadialProfile, SharpnessError> {
        match *self {
            ExtremizerFamily::LogHardyFk { gamma, p, big_r } => {
                let k = index;
                if !(k > 0.0 && k.is_finite()) || 1.0 / k >= big_r / 2.0 {
                    return Err(SharpnessError::FamilyIndex { index, reason: "pieces overlap unless 1/k < R/2".into() });
                }
                let e = (gamma - 1.0) / p;
                let plateau = Expr::c((k * big_r).ln().powf(e));
                let middle = Expr::pow(Expr::log(Expr::div(Expr::c(big_r), Expr::Var)), e);
                let ramp = Expr::scale(2.0 / big_r * 2f64.ln().powf(e), Expr::affine(-1.0, big_r));
                let expr = Expr::piecewise(Expr::Var, vec![1.0 / k, big_r / 2.0], vec![plateau, middle, ramp]);
                Ok(RadialProfile::new(expr, Support::Compact { lo: 0.0, hi: big_r }, vec![1.0 / k, big_r / 2.0])?)
            }
            ExtremizerFamily::TruncatedPower { exponent, anchor_radius, .. } => {
                if !(anchor_radius > 0.0 && anchor_radius.is_finite() && index > 0.0 && index.is_finite()) {
                    return Err(SharpnessError::FamilyIndex { index, reason: "needs a positive index and anchor".into() });
                }
                let (u0, u1) = self.log_window(index);
                let tau = TRANSITION_FRACTION * (u1 - u0);
                let expr = Expr::mul(vec![Expr::power_of_r(exponent), window(Expr::log(Expr::Var), u0, u1)]);
                let support = Support::Compact { lo: u0.exp(), hi: u1.exp() };
                Ok(RadialProfile::new(expr, support, vec![(u0 + tau).exp(), (u1 - tau).exp()])?)
            }
            ExtremizerFamily::TruncatedLogPower { exponent } => {
                if !(index > 0.0 && index.is_finite()) {
                    return Err(SharpnessError::FamilyIndex { index, reason: "needs a positive index".into() });
                }
                let (v0, v1) = self.log_window(index);
                let tau = TRANSITION_FRACTION * (v1 - v0);
                let loglog = Expr::log(Expr::log(Expr::Var));
                let expr = Expr::mul(vec![Expr::pow(Expr::log(Expr::Var), exponent), window(loglog, v0, v1)]);
                let support = Support::Compact { lo: v0.exp().exp(), hi: v1.exp().exp() };
                Ok(RadialProfile::new(expr, support, vec![(v0 + tau).exp().exp(), (v1 - tau).exp().exp()])?)
            }
        }
    }

    /// Window ends in the slow variable (`log r`, or `log log r` for the log-power family).
    fn log_window(&self, index: f64) -> (f64, f64) {
        let w = index * std::f64::consts::LN_10;
        match *self {
            ExtremizerFamily::TruncatedPower { anchor_radius, anchor, .. } => {
                let a = anchor_radius.ln();
                match anchor {
                    Anchor::Center => (a - w, a + w),
                    Anchor::Upper => (a - 2.0 * w, a),
                    Anchor::Lower => (a, a + 2.0 * w),
                }
            }
            _ => (-w, w),
        }
    }

    /// Slow variable in which the probe ratio converges: `log log kR - log log 2` for the
    /// log-Hardy family, the window length otherwise.
    pub fn slow_variable(&self, index: f64) -> f64 {
        match *self {
            ExtremizerFamily::LogHardyFk { big_r, .. } => (index * big_r).ln().ln() - 2f64.ln().ln(),
            _ => {
                let (a, b) = self.log_window(index);
                b - a
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ExtremizerFamily::LogHardyFk { .. } => "LogHardy_fk",
            ExtremizerFamily::TruncatedPower { .. } => "TruncatedPower",
            ExtremizerFamily::TruncatedLogPower { .. } => "TruncatedLogPower",
        }
    }
}

/// Closed forms of the function-side and gradient-side integrals of `f_k` over `B(0, R)`:
///
/// * function side: `sigma/(gamma-1) + sigma L + C_{R,gamma,p}`
/// * gradient side: `sigma ((gamma-1)/p)^p L + C_{gamma,p}`
///
/// with `L = log log kR - log log 2`; the two constants are one-dimensional integrals evaluated
/// by quadrature.
pub fn log_hardy_closed_forms(
    k: f64,
    gamma: f64,
    p: f64,
    big_r: f64,
    setting: &HomogeneousSetting,
) -> Result<(f64, f64), SharpnessError> {
    let fam = log_hardy_family(gamma, p, big_r)?;
    if !(k * big_r > std::f64::consts::E) || 1.0 / k >= big_r / 2.0 {
        return Err(SharpnessError::FamilyIndex { index: k, reason: "needs log(kR) > 1 and 1/k < R/2".into() });
    }
    let sigma = setting.sigma();
    let l = fam.slow_variable(k);
    let (c_grad, c_fun) = log_hardy_constants(gamma, p, big_r, sigma)?;
    let lhs = sigma / (gamma - 1.0) + sigma * l + c_fun;
    let rhs = sigma * ((gamma - 1.0) / p).powf(p) * l + c_grad;
    Ok((lhs, rhs))
}

/// `(C_{gamma,p}, C_{R,gamma,p})`.
fn log_hardy_constants(gamma: f64, p: f64, big_r: f64, sigma: f64) -> Result<(f64, f64), SharpnessError> {
    let tol = Tolerance { abs: 1e-15, rel: 1e-13, ..Tolerance::default() };
    let ln2 = 2f64.ln();
    let a = integrate_fn(
        &|s: f64| s.powf(p - gamma) * (-p * s).exp(),
        0.0,
        ln2,
        &[],
        &[SingularityAnnotation::algebraic(0.0, p - gamma)],
        &tol,
    )?;
    let b = integrate_fn(
        &|r: f64| (big_r - r).powf(p) * (big_r / r).ln().powf(-gamma) / r,
        big_r / 2.0,
        big_r,
        &[],
        &[SingularityAnnotation::algebraic(big_r, p - gamma)],
        &tol,
    )?;
    let c_grad = 2f64.powf(p) * ln2.powf(gamma - 1.0) * sigma * a.value;
    let c_fun = ln2.powf(gamma - 1.0) * (2.0 / big_r).powf(p) * sigma * b.value;
    Ok((c_grad, c_fun))
}

/// The same two integrals computed by weighted quadrature of `f_k` and its derivative.
pub fn log_hardy_quadrature(
    k: f64,
    gamma: f64,
    p: f64,
    big_r: f64,
    setting: &HomogeneousSetting,
    tol: &Tolerance,
) -> Result<(f64, f64), SharpnessError> {
    let f = log_hardy_family(gamma, p, big_r)?.profile(k)?;
    let q = setting.q();
    let kind = LogKind::LogRatio { radius: big_r };
    let wf = WeightSpec::power(-q / p).with_log(kind, -gamma / p)?;
    let wg = WeightSpec::power((p - q) / p).with_log(kind, (p - gamma) / p)?;
    let lhs = weighted_integral(&f, &wf, p, setting, tol)?;
    let rhs = weighted_integral(&f.derivative(1)?, &wg, p, setting, tol)?;
    Ok((lhs.value, rhs.value))
}
