//! Pointwise equality cases of the Hölder steps behind the sharpness claims: both sides are
//! evaluated from the symbolic profile and its derivative.

use serde::Serialize;

use super::CatalogError;
use crate::model::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderSides {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl HolderSides {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).abs() / scale
        }
    }
}

fn euler(e: &Expr) -> Expr {
    Expr::mul(vec![Expr::Var, e.derivative()])
}

fn nonzero(c: f64) -> Result<(), CatalogError> {
    if c == 0.0 || !c.is_finite() {
        Err(CatalogError::ExponentRelation(format!("exponent C must be finite and non-zero, got {c}")))
    } else {
        Ok(())
    }
}

/// `|1/C|^p (|E g| / r^alpha)^p` against `(|g|^(p-1) / r^(alpha(p-1)))^(p/(p-1))` for `g = r^C`.
pub fn holder_power(c: f64, alpha: f64, p: f64, grid: &[f64]) -> Result<Vec<HolderSides>, CatalogError> {
    nonzero(c)?;
    let g = Expr::power_of_r(c);
    let eg = euler(&g);
    Ok(grid
        .iter()
        .map(|&r| {
            let lhs = (1.0 / c).abs().powf(p) * (eg.eval(r).abs() / r.powf(alpha)).powf(p);
            let rhs = (g.eval(r).abs().powf(p - 1.0) / r.powf(alpha * (p - 1.0))).powf(p / (p - 1.0));
            HolderSides { r, lhs, rhs }
        })
        .collect())
}

/// `|1/C|^p (|E h| |log r| / r^(Q/p))^p` against `(|h|^(p-1) / r^(Q(p-1)/p))^(p/(p-1))` for
/// `h = (log r)^C`.
pub fn holder_log_power(c: f64, q: f64, p: f64, grid: &[f64]) -> Result<Vec<HolderSides>, CatalogError> {
    nonzero(c)?;
    let h = Expr::pow(Expr::log(Expr::Var), c);
    let eh = euler(&h);
    Ok(grid
        .iter()
        .map(|&r| {
            let lhs = (1.0 / c).abs().powf(p) * (eh.eval(r).abs() * r.ln().abs() / r.powf(q / p)).powf(p);
            let rhs = (h.eval(r).abs().powf(p - 1.0) / r.powf(q * (p - 1.0) / p)).powf(p / (p - 1.0));
            HolderSides { r, lhs, rhs }
        })
        .collect())
}

/// `|h|^p / r^(p(1-a))` against `|h|^q / r^(-bq)` for `h = r^((p(1-a) + bq)/(p-q))`.
pub fn holder_mixed_power(p: f64, q: f64, a: f64, b: f64, grid: &[f64]) -> Result<Vec<HolderSides>, CatalogError> {
    if p == q {
        return Err(CatalogError::ExponentRelation("the mixed-norm extremal needs p != q".into()));
    }
    let h = Expr::power_of_r((p * (1.0 - a) + b * q) / (p - q));
    Ok(grid
        .iter()
        .map(|&r| {
            let v = h.eval(r).abs();
            HolderSides { r, lhs: v.powf(p) / r.powf(p * (1.0 - a)), rhs: v.powf(q) / r.powf(-b * q) }
        })
        .collect())
}
