use super::expr::Expr;
use super::ModelError;

/// Where a profile may be non-zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// `[lo, hi]` with `0 <= lo <= hi < infinity`; the profile is 0 outside.
    Compact { lo: f64, hi: f64 },
    /// All of `(0, infinity)`; used for extremal powers and for differences such as `f - f(R)`.
    Whole,
}

impl Support {
    pub fn contains(&self, r: f64) -> bool {
        match *self {
            Support::Compact { lo, hi } => r >= lo && r <= hi,
            Support::Whole => r > 0.0,
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Support::Compact { lo, hi } => (lo, hi),
            Support::Whole => (0.0, f64::INFINITY),
        }
    }

    fn hull(a: Support, b: Support) -> Support {
        match (a, b) {
            (Support::Compact { lo: l1, hi: h1 }, Support::Compact { lo: l2, hi: h2 }) => {
                Support::Compact { lo: l1.min(l2), hi: h1.max(h2) }
            }
            _ => Support::Whole,
        }
    }

    fn intersection(a: Support, b: Support) -> Support {
        match (a, b) {
            (Support::Compact { lo: l1, hi: h1 }, Support::Compact { lo: l2, hi: h2 }) => {
                let lo = l1.max(l2);
                let hi = h1.min(h2);
                if lo <= hi {
                    Support::Compact { lo, hi }
                } else {
                    Support::Compact { lo, hi: lo }
                }
            }
            (Support::Whole, s) | (s, Support::Whole) => s,
        }
    }
}

/// A radius where a derivative of the requested order carries a point mass because a lower
/// derivative jumps there. The derivative profile is still defined one-sidedly.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWarning {
    pub radius: f64,
    pub order: usize,
}

impl std::fmt::Display for EdgeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "derivative of order {} has a distributional part at r = {}; values are one-sided",
            self.order, self.radius
        )
    }
}

/// Radial function `f(r)` given by an expression, a support and its non-smooth radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    expr: Expr,
    support: Support,
    breakpoints: Vec<f64>,
}

impl RadialProfile {
    pub fn new(expr: Expr, support: Support, breakpoints: Vec<f64>) -> Result<Self, ModelError> {
        if let Support::Compact { lo, hi } = support {
            if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
                return Err(ModelError::InvalidSupport { lo, hi });
            }
        }
        let mut breakpoints = breakpoints;
        if breakpoints.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return Err(ModelError::InvalidBreakpoints);
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Ok(Self { expr, support, breakpoints })
    }

    /// Profile on a compact support without breakpoints.
    pub fn compact(expr: Expr, lo: f64, hi: f64) -> Result<Self, ModelError> {
        Self::new(expr, Support::Compact { lo, hi }, Vec::new())
    }

    /// Profile defined on all of `(0, infinity)`.
    pub fn whole(expr: Expr) -> Self {
        Self { expr, support: Support::Whole, breakpoints: Vec::new() }
    }

    /// Unit-peak smooth bump on `[lo, hi]`.
    pub fn bump(lo: f64, hi: f64) -> Result<Self, ModelError> {
        if !(0.0 < lo && lo < hi) {
            return Err(ModelError::InvalidSupport { lo, hi });
        }
        Self::compact(Expr::bump(lo, hi), lo, hi)
    }

    pub fn zero() -> Self {
        Self { expr: Expr::Const(0.0), support: Support::Compact { lo: 1.0, hi: 1.0 }, breakpoints: vec![] }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_identically_zero(&self) -> bool {
        self.expr.is_zero()
            || matches!(self.support, Support::Compact { lo, hi } if lo == hi)
    }

    /// `f(r)` without checks: 0 outside a compact support, possibly non-finite elsewhere.
    pub fn value(&self, r: f64) -> f64 {
        if !self.support.contains(r) {
            return 0.0;
        }
        self.expr.eval(r)
    }

    /// `f(r)` for `r > 0`; a non-finite value is reported with its radius.
    pub fn eval(&self, r: f64) -> Result<f64, ModelError> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(ModelError::InvalidRadius(r));
        }
        let v = self.value(r);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ModelError::EvaluationFault { radius: r, value: v })
        }
    }

    /// Exact derivative of the given order; the support and breakpoints are kept.
    pub fn derivative(&self, order: usize) -> Result<RadialProfile, ModelError> {
        if order == 0 {
            return Err(ModelError::InvalidOrder);
        }
        let mut e = self.expr.clone();
        for _ in 0..order {
            e = e.derivative();
        }
        Ok(Self { expr: e, support: self.support, breakpoints: self.breakpoints.clone() })
    }

    /// Radii where the derivative of the given order picks up a point mass: a jump of some
    /// lower-order derivative at a breakpoint or at an edge of a compact support.
    pub fn distributional_edges(&self, order: usize) -> Vec<EdgeWarning> {
        let mut out = Vec::new();
        let mut edges: Vec<f64> = self.breakpoints.clone();
        if let Support::Compact { lo, hi } = self.support {
            if lo > 0.0 {
                edges.push(lo);
            }
            edges.push(hi);
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let mut d = self.expr.clone();
        for j in 0..order {
            for &b in &edges {
                let eps = 1e-9 * b.max(1e-300);
                let left = if self.support.contains(b - eps) { d.eval(b - eps) } else { 0.0 };
                let right = if self.support.contains(b + eps) { d.eval(b + eps) } else { 0.0 };
                let scale = left.abs().max(right.abs());
                if scale > 1e-12 && (left - right).abs() > 1e-6 * scale {
                    out.push(EdgeWarning { radius: b, order: j + 1 });
                }
            }
            d = d.derivative();
        }
        out.sort_by(|a, b| a.radius.total_cmp(&b.radius).then(a.order.cmp(&b.order)));
        out.dedup_by(|a, b| a.radius == b.radius);
        out
    }

    /// Euler operator `r f'(r)`.
    pub fn euler(&self) -> RadialProfile {
        Self {
            expr: Expr::mul(vec![Expr::Var, self.expr.derivative()]),
            support: self.support,
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// `r -> f(lambda r)`; support and breakpoints are divided by `lambda`.
    pub fn dilate(&self, lambda: f64) -> Result<RadialProfile, ModelError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ModelError::InvalidDilation(lambda));
        }
        let support = match self.support {
            Support::Compact { lo, hi } => Support::Compact { lo: lo / lambda, hi: hi / lambda },
            Support::Whole => Support::Whole,
        };
        Ok(Self {
            expr: self.expr.substitute(&Expr::scale(lambda, Expr::Var)),
            support,
            breakpoints: self.breakpoints.iter().map(|b| b / lambda).collect(),
        })
    }

    /// `f(s(r))` for an increasing radius map `s`; the caller supplies the pulled-back support
    /// and breakpoints.
    pub fn compose(
        &self,
        inner: &Expr,
        support: Support,
        breakpoints: Vec<f64>,
    ) -> Result<RadialProfile, ModelError> {
        Self::new(self.expr.substitute(inner), support, breakpoints)
    }

    pub fn scale(&self, c: f64) -> RadialProfile {
        Self {
            expr: Expr::scale(c, self.expr.clone()),
            support: self.support,
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// Expression valid on `target`, equal to this profile there (zero outside its own support).
    fn expr_on(&self, target: Support) -> Expr {
        match self.support {
            Support::Compact { lo, hi } if target != self.support => {
                if lo == hi {
                    return Expr::Const(0.0);
                }
                let mut breaks = Vec::new();
                let mut pieces = Vec::new();
                let (tlo, thi) = target.bounds();
                if lo > tlo {
                    breaks.push(lo);
                    pieces.push(Expr::Const(0.0));
                }
                pieces.push(self.expr.clone());
                if hi < thi {
                    // include hi itself in the middle piece
                    breaks.push(next_up(hi));
                    pieces.push(Expr::Const(0.0));
                }
                Expr::piecewise(Expr::Var, breaks, pieces)
            }
            _ => self.expr.clone(),
        }
    }

    fn merged_breaks(&self, other: &RadialProfile, support: Support) -> Vec<f64> {
        let mut b: Vec<f64> = self.breakpoints.iter().chain(other.breakpoints.iter()).copied().collect();
        for s in [self.support, other.support] {
            if s != support {
                if let Support::Compact { lo, hi } = s {
                    if lo > 0.0 {
                        b.push(lo);
                    }
                    b.push(hi);
                }
            }
        }
        let (lo, hi) = support.bounds();
        b.retain(|x| *x > lo && *x < hi);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn add(&self, other: &RadialProfile) -> RadialProfile {
        let support = Support::hull(self.support, other.support);
        let expr = Expr::add(vec![self.expr_on(support), other.expr_on(support)]);
        let breakpoints = self.merged_breaks(other, support);
        Self { expr, support, breakpoints }
    }

    pub fn sub(&self, other: &RadialProfile) -> RadialProfile {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &RadialProfile) -> RadialProfile {
        let support = Support::intersection(self.support, other.support);
        let expr = Expr::mul(vec![self.expr.clone(), other.expr.clone()]);
        let breakpoints = self.merged_breaks(other, support);
        Self { expr, support, breakpoints }
    }

    /// Multiply by a bare expression (for instance a power of `r`), keeping the support.
    pub fn times_expr(&self, e: Expr) -> RadialProfile {
        Self {
            expr: Expr::mul(vec![e, self.expr.clone()]),
            support: self.support,
            breakpoints: self.breakpoints.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        super::text::print_profile(self)
    }

    pub fn parse(text: &str) -> Result<RadialProfile, ModelError> {
        super::text::parse_profile(text)
    }
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_outside_support_is_zero() {
        let b = RadialProfile::bump(1.0, 2.0).unwrap();
        assert_eq!(b.eval(3.0).unwrap(), 0.0);
        assert!((b.eval(1.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_square() {
        let p = RadialProfile::whole(Expr::power_of_r(-2.0));
        assert_eq!(p.eval(2.0).unwrap(), 0.25);
        assert!(matches!(p.eval(0.0), Err(ModelError::InvalidRadius(_))));
    }

    #[test]
    fn evaluation_fault_reports_radius() {
        let p = RadialProfile::whole(Expr::pow(Expr::log(Expr::Var), 0.5));
        match p.eval(0.5) {
            Err(ModelError::EvaluationFault { radius, .. }) => assert_eq!(radius, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn euler_of_constant_vanishes() {
        let p = RadialProfile::compact(Expr::Const(1.0), 1.0, 2.0).unwrap();
        assert_eq!(p.euler().eval(1.5).unwrap(), 0.0);
    }

    #[test]
    fn dilation_divides_support() {
        let p = RadialProfile::bump(1.0, 2.0).unwrap().dilate(4.0).unwrap();
        assert_eq!(p.support(), Support::Compact { lo: 0.25, hi: 0.5 });
        assert!((p.eval(0.375).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_summands_do_not_leak() {
        let a = RadialProfile::compact(Expr::power_of_r(-2.0), 1.0, 2.0).unwrap();
        let b = RadialProfile::bump(3.0, 4.0).unwrap();
        let s = a.add(&b);
        assert_eq!(s.support(), Support::Compact { lo: 1.0, hi: 4.0 });
        assert_eq!(s.eval(2.5).unwrap(), 0.0);
        assert_eq!(s.eval(2.0).unwrap(), 0.25);
        assert!((s.eval(3.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.breakpoints().contains(&2.0));
    }

    #[test]
    fn kinks_are_reported_for_second_derivatives() {
        let ramp = RadialProfile::new(
            Expr::piecewise(Expr::Var, vec![2.0], vec![Expr::Var, Expr::Const(2.0)]),
            Support::Compact { lo: 1.0, hi: 3.0 },
            vec![2.0],
        )
        .unwrap();
        let w = ramp.distributional_edges(2);
        assert!(w.iter().any(|e| e.radius == 2.0 && e.order == 2));
        assert!(ramp.distributional_edges(1).iter().all(|e| e.radius != 2.0));
        let smooth = RadialProfile::bump(1.0, 2.0).unwrap();
        assert!(smooth.distributional_edges(3).is_empty());
    }
}
