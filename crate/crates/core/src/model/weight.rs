use super::expr::{pow_real, Expr};
use super::ModelError;

/// Which logarithm a weight carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogKind {
    /// `|log r|`, singular or vanishing at `r = 1`.
    AbsLog,
    /// `|log(R/r)|`, singular or vanishing at `r = R`.
    LogRatio { radius: f64 },
}

impl LogKind {
    pub fn singular_radius(&self) -> f64 {
        match *self {
            LogKind::AbsLog => 1.0,
            LogKind::LogRatio { radius } => radius,
        }
    }

    /// The signed logarithm `log r` or `log(R/r)`.
    pub fn log_value(&self, r: f64) -> f64 {
        match *self {
            LogKind::AbsLog => r.ln(),
            LogKind::LogRatio { radius } => (radius / r).ln(),
        }
    }

    /// [`log_value`](Self::log_value) at `r = e + d`, accurate in `d` when `e` is the radius
    /// where the logarithm vanishes.
    pub fn log_value_offset(&self, e: f64, d: f64) -> f64 {
        match *self {
            LogKind::AbsLog if e == 1.0 => d.ln_1p(),
            LogKind::LogRatio { radius } if e == radius => -(d / radius).ln_1p(),
            _ => self.log_value(e + d),
        }
    }

    /// Signed logarithm as an expression in `r`.
    pub fn log_expr(&self) -> Expr {
        match *self {
            LogKind::AbsLog => Expr::log(Expr::Var),
            LogKind::LogRatio { radius } => Expr::log(Expr::div(Expr::Const(radius), Expr::Var)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFactor {
    pub kind: LogKind,
    pub exponent: f64,
}

/// The factor `(a + b r^alpha)^(beta/p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superweight {
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
}

impl Superweight {
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64) -> Result<Self, ModelError> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(ModelError::InvalidWeight(format!("superweight needs a, b > 0 (a = {a}, b = {b})")));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(ModelError::InvalidWeight("superweight exponents must be finite".into()));
        }
        Ok(Self { a, b, alpha, beta })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `a + b r^alpha`.
    pub fn base(&self, r: f64) -> f64 {
        self.a + self.b * pow_real(r, self.alpha)
    }

    pub fn base_expr(&self) -> Expr {
        Expr::add(vec![Expr::Const(self.a), Expr::scale(self.b, Expr::power_of_r(self.alpha))])
    }
}

/// Weight `r^power * |log|^log_power * (a + b r^alpha)^(beta/p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    power: f64,
    log: Option<LogFactor>,
    superweight: Option<Superweight>,
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self::power(0.0)
    }
}

impl WeightSpec {
    pub fn power(power: f64) -> Self {
        Self { power, log: None, superweight: None }
    }

    /// Adds a logarithmic factor; an exponent of 0 leaves the weight unchanged.
    pub fn with_log(mut self, kind: LogKind, exponent: f64) -> Result<Self, ModelError> {
        if let LogKind::LogRatio { radius } = kind {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(ModelError::InvalidWeight(format!("log radius must be positive, got {radius}")));
            }
        }
        if !exponent.is_finite() {
            return Err(ModelError::InvalidWeight("log exponent must be finite".into()));
        }
        self.log = if exponent == 0.0 { None } else { Some(LogFactor { kind, exponent }) };
        Ok(self)
    }

    pub fn with_superweight(mut self, sw: Superweight) -> Self {
        self.superweight = Some(sw);
        self
    }

    pub fn power_exponent(&self) -> f64 {
        self.power
    }

    pub fn log_factor(&self) -> Option<LogFactor> {
        self.log
    }

    pub fn superweight(&self) -> Option<Superweight> {
        self.superweight
    }

    /// Radii other than 0 where the weight is singular or vanishes.
    pub fn singular_radii(&self) -> Vec<f64> {
        self.log.iter().map(|l| l.kind.singular_radius()).collect()
    }

    /// Weight value at `r` for integrability exponent `p`.
    pub fn eval(&self, r: f64, p: f64) -> f64 {
        let mut w = pow_real(r, self.power);
        if let Some(l) = self.log {
            w *= pow_real(l.kind.log_value(r).abs(), l.exponent);
        }
        if let Some(sw) = self.superweight {
            w *= sw.base(r).powf(sw.beta / p);
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superweight_requires_positive_coefficients() {
        assert!(Superweight::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Superweight::new(1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn composite_weight_value() {
        let w = WeightSpec::power(-1.0)
            .with_log(LogKind::LogRatio { radius: 2.0 }, 2.0)
            .unwrap()
            .with_superweight(Superweight::new(1.0, 3.0, 2.0, 4.0).unwrap());
        let r: f64 = 0.5;
        let expected = 2.0 * (4.0f64).ln().powi(2) * (1.0 + 3.0 * 0.25f64).powf(2.0);
        assert!((w.eval(r, 2.0) - expected).abs() < 1e-13 * expected);
        assert_eq!(w.singular_radii(), vec![2.0]);
    }

    #[test]
    fn zero_log_exponent_is_dropped() {
        let w = WeightSpec::power(1.0).with_log(LogKind::AbsLog, 0.0).unwrap();
        assert!(w.log_factor().is_none());
    }
}
