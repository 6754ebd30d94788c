//! Analytic models for the part of an endpoint integral closest to the singularity.
//!
//! With `d` the distance to the endpoint, the integrand on `(0, d_c)` is modeled as
//! `d^lambda P(d)` with `P` a cubic through four geometric samples when there is no log
//! factor (the quadratic through the first three gives the error estimate), and as
//! `A d^lambda (log(1/d) + c)^mu` otherwise, fitted through two samples, with a second pair
//! giving the error estimate.

use super::adaptive::integrate_smooth;
use super::QuadError;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tail {
    pub value: f64,
    pub error: f64,
}

/// `int_0^{d_c} G(d) dd`; `location` is only used for error reporting.
pub(crate) fn tail(
    g: &dyn Fn(f64) -> Result<f64, QuadError>,
    d_c: f64,
    lambda: f64,
    mu: f64,
    location: f64,
) -> Result<Tail, QuadError> {
    let (t1, t2) = if mu == 0.0 {
        algebraic(g, d_c, lambda)?
    } else {
        (logarithmic(g, d_c, 0.1, lambda, mu, location)?, logarithmic(g, d_c, 0.01, lambda, mu, location)?)
    };
    Ok(Tail { value: t1, error: (t1 - t2).abs() + 1e-14 * t1.abs() })
}

/// Cubic and quadratic fits of `G(d_c t) / t^lambda`, integrated against `t^lambda`. Scaling by
/// `t = d / d_c` keeps the normalization finite for large `lambda`.
fn algebraic(g: &dyn Fn(f64) -> Result<f64, QuadError>, d_c: f64, lambda: f64) -> Result<(f64, f64), QuadError> {
    let ts = [1.0, 0.5, 0.25, 0.125];
    let mut ys = [0.0; 4];
    for (y, t) in ys.iter_mut().zip(ts) {
        *y = g(d_c * t)? / t.powf(lambda);
    }
    let integrate = |coef: &[f64]| {
        let s: f64 = coef.iter().enumerate().map(|(j, a)| a / (lambda + j as f64 + 1.0)).sum();
        s * d_c
    };
    Ok((integrate(&monomial_fit(&ts, &ys)), integrate(&monomial_fit(&ts[..3], &ys[..3]))))
}

/// Coefficients `a_j` of the interpolating polynomial `sum a_j t^j` (Newton form, expanded).
fn monomial_fit(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = ts.len();
    let mut dd = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (ts[i] - ts[i - k]);
        }
    }
    let mut coef = vec![0.0; n];
    for k in (0..n).rev() {
        // coef <- coef * (t - ts[k]) + dd[k]
        let mut next = vec![0.0; n];
        for j in 0..n {
            if j + 1 < n {
                next[j + 1] += coef[j];
            }
            next[j] -= coef[j] * ts[k];
        }
        next[0] += dd[k];
        coef = next;
    }
    coef
}

fn logarithmic(
    g: &dyn Fn(f64) -> Result<f64, QuadError>,
    d_c: f64,
    shrink: f64,
    lambda: f64,
    mu: f64,
    location: f64,
) -> Result<f64, QuadError> {
    let d1 = d_c;
    let d2 = d_c * shrink;
    let y1 = g(d1)? / d1.powf(lambda);
    let y2 = g(d2)? / d2.powf(lambda);
    // underflowed samples carry no shape information and bound a tail below ~1e-300
    if y1.abs() < f64::MIN_POSITIVE || y2.abs() < f64::MIN_POSITIVE {
        return Ok(0.0);
    }
    if y1.signum() != y2.signum() {
        return Err(QuadError::TailModel(location));
    }
    let l1 = -d1.ln();
    let l2 = -d2.ln();
    let rho = (y1 / y2).powf(1.0 / mu);
    if (1.0 - rho).abs() < 1e-14 {
        // no visible log dependence: fall back to a pure power
        if lambda <= -1.0 {
            return Err(QuadError::TailModel(location));
        }
        return Ok(y1 * d_c.powf(lambda + 1.0) / (lambda + 1.0));
    }
    let c = (rho * l2 - l1) / (1.0 - rho);
    let lc = l1 + c;
    if !(lc > 0.0) {
        return Err(QuadError::TailModel(location));
    }
    let a = y1 / lc.powf(mu);
    if lambda == -1.0 {
        return Ok(a * lc.powf(mu + 1.0) / (-(mu + 1.0)));
    }
    // int_{L_c}^inf e^{-(lambda+1) u} (u + c)^mu du with u = L_c + t/(lambda+1)
    let k = lambda + 1.0;
    let f = |t: f64| (-t).exp() * (lc + t / k).powf(mu);
    let integral = integrate_smooth(&f, 0.0, 60.0, 1e-15)?;
    Ok(a * d_c.powf(k) / k * integral)
}
