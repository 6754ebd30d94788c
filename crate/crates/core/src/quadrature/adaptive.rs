//! Globally adaptive Gauss-Kronrod integration over a list of charts.
//!
//! Regular panels are integrated in `r` directly. A panel end with a singularity annotation is
//! integrated in `u = -log d`, `d` being the distance to the endpoint (or `1/r` at infinity),
//! down to a cut distance `d_c`; the rest comes from the endpoint models in `endpoint`.
//! All charts share one error-ordered heap, so effort goes wherever the error is largest.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::endpoint::{tail, Tail};
use super::gk::gk21;
use super::{IntegralResult, QuadError, SingularityAnnotation, Tolerance};
use crate::model::Expr;

/// Exponents `(lambda, mu)` attached to one end of a panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EndBehavior {
    pub lambda: f64,
    pub mu: f64,
}

/// Evaluation point. Next to a finite singular endpoint `e` the exact signed offset `d` with
/// `r = e + d` is carried along, since `r` itself has lost the low digits of `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Point {
    pub r: f64,
    pub near: Option<(f64, f64)>,
}

impl Point {
    fn at(r: f64) -> Self {
        Self { r, near: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub left: Option<EndBehavior>,
    pub right: Option<EndBehavior>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Chart {
    Linear,
    /// `r = e + exp(-u)`
    FromLeft(f64),
    /// `r = e - exp(-u)`
    FromRight(f64),
    /// `r = exp(u)`
    Infinite,
}

impl Chart {
    fn point_and_jacobian(&self, u: f64) -> (Point, f64) {
        match *self {
            Chart::Linear => (Point::at(u), 1.0),
            Chart::FromLeft(e) => {
                let d = (-u).exp();
                (Point { r: e + d, near: Some((e, d)) }, d)
            }
            Chart::FromRight(e) => {
                let d = (-u).exp();
                (Point { r: e - d, near: Some((e, -d)) }, d)
            }
            Chart::Infinite => {
                let r = u.exp();
                (Point::at(r), r)
            }
        }
    }
}

struct Segment {
    chart: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: u64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.seq.cmp(&self.seq))
    }
}

fn check_value(r: f64, v: f64) -> Result<f64, QuadError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::EvaluationFault { radius: r, value: v })
    }
}

fn eval_chart(f: &dyn Fn(Point) -> f64, chart: Chart, u: f64) -> Result<f64, QuadError> {
    let (pt, jac) = chart.point_and_jacobian(u);
    let v = f(pt);
    if v == 0.0 {
        return Ok(0.0);
    }
    check_value(pt.r, v * jac)
}

const CUT_DECADES: f64 = 15.0;

struct Plan {
    charts: Vec<Chart>,
    pieces: Vec<(usize, f64, f64)>,
    tails: Vec<Tail>,
    fragile: bool,
}

impl Plan {
    fn chart(&mut self, c: Chart) -> usize {
        self.charts.push(c);
        self.charts.len() - 1
    }

    fn linear(&mut self, a: f64, b: f64) {
        let c = self.chart(Chart::Linear);
        if a > 0.0 && b / a > 4.0 {
            let n = ((b / a).ln() / 4f64.ln()).ceil() as usize;
            let ratio = (b / a).ln() / n as f64;
            let mut prev = a;
            for i in 1..=n {
                let next = if i == n { b } else { a * (ratio * i as f64).exp() };
                self.pieces.push((c, prev, next));
                prev = next;
            }
        } else {
            self.pieces.push((c, a, b));
        }
    }

    fn log_range(&mut self, chart: Chart, u0: f64, u1: f64) {
        let c = self.chart(chart);
        let n = ((u1 - u0) / 4.0).ceil().max(1.0) as usize;
        let step = (u1 - u0) / n as f64;
        for i in 0..n {
            let hi = if i + 1 == n { u1 } else { u0 + step * (i + 1) as f64 };
            self.pieces.push((c, u0 + step * i as f64, hi));
        }
    }

    fn check(&mut self, location: f64, e: EndBehavior) -> Result<(), QuadError> {
        let ann = SingularityAnnotation::new(location, e.lambda, e.mu);
        if !ann.is_integrable() {
            return Err(QuadError::NonIntegrable { location, lambda: e.lambda, mu: e.mu });
        }
        self.fragile |= ann.is_fragile();
        Ok(())
    }

    /// Singular end `e` of a panel whose other end is `o`.
    fn singular_end(
        &mut self,
        f: &dyn Fn(Point) -> f64,
        e: f64,
        o: f64,
        end: EndBehavior,
    ) -> Result<(), QuadError> {
        self.check(e, end)?;
        if e.is_infinite() {
            let u0 = o.ln();
            let u1 = u0 + CUT_DECADES * std::f64::consts::LN_10;
            let d_c = (-u1).exp();
            self.log_range(Chart::Infinite, u0, u1);
            let g = |d: f64| {
                let r = 1.0 / d;
                let v = f(Point::at(r));
                if v == 0.0 {
                    Ok(0.0)
                } else {
                    check_value(r, v * r * r)
                }
            };
            self.tails.push(tail(&g, d_c, end.lambda, end.mu, e)?);
            return Ok(());
        }
        let h = (o - e).abs();
        let d_c = if e == 0.0 {
            h * 10f64.powf(-CUT_DECADES)
        } else {
            (0.01 * h).min(1e-6 * e)
        };
        let sign = if o > e { 1.0 } else { -1.0 };
        let chart = if sign > 0.0 { Chart::FromLeft(e) } else { Chart::FromRight(e) };
        self.log_range(chart, -h.ln(), -d_c.ln());
        let g = |d: f64| {
            let r = e + sign * d;
            let v = f(Point { r, near: (e > 0.0).then_some((e, sign * d)) });
            if v == 0.0 {
                Ok(0.0)
            } else {
                check_value(r, v)
            }
        };
        self.tails.push(tail(&g, d_c, end.lambda, end.mu, e)?);
        Ok(())
    }

    fn panel(&mut self, f: &dyn Fn(Point) -> f64, p: &Panel) -> Result<(), QuadError> {
        match (p.left, p.right) {
            (None, None) => {
                if p.b.is_infinite() {
                    return Err(QuadError::MissingInfiniteAnnotation);
                }
                self.linear(p.a, p.b);
                Ok(())
            }
            (Some(l), None) => {
                if p.b.is_infinite() {
                    return Err(QuadError::MissingInfiniteAnnotation);
                }
                self.singular_end(f, p.a, p.b, l)
            }
            (None, Some(r)) if p.b.is_infinite() && p.a == 0.0 => {
                self.linear(0.0, 1.0);
                self.singular_end(f, p.b, 1.0, r)
            }
            (None, Some(r)) => self.singular_end(f, p.b, p.a, r),
            (Some(l), Some(r)) => {
                let m = if p.b.is_infinite() {
                    if p.a == 0.0 {
                        1.0
                    } else {
                        2.0 * p.a
                    }
                } else if p.a == 0.0 {
                    0.5 * p.b
                } else if p.b / p.a > 4.0 {
                    (p.a * p.b).sqrt()
                } else {
                    0.5 * (p.a + p.b)
                };
                self.singular_end(f, p.a, m, l)?;
                self.singular_end(f, p.b, m, r)
            }
        }
    }
}

/// Integrate `f` over consecutive panels.
pub(crate) fn integrate_panels(
    f: &dyn Fn(Point) -> f64,
    panels: &[Panel],
    tol: &Tolerance,
) -> Result<IntegralResult, QuadError> {
    tol.validate()?;
    let mut plan = Plan { charts: Vec::new(), pieces: Vec::new(), tails: Vec::new(), fragile: false };
    for p in panels {
        if !(p.a < p.b) {
            return Err(QuadError::InvalidInterval { lo: p.a, hi: p.b });
        }
        plan.panel(f, p)?;
    }
    let Plan { charts, pieces, tails, fragile } = plan;

    let mut seq = 0u64;
    let mut heap = BinaryHeap::with_capacity(pieces.len() * 4);
    let mut total_v: f64 = tails.iter().map(|t| t.value).sum();
    let mut total_e: f64 = tails.iter().map(|t| t.error).sum();
    for (c, a, b) in pieces {
        let mut g = |u: f64| eval_chart(f, charts[c], u);
        let rr = gk21(&mut g, a, b)?;
        total_v += rr.value;
        total_e += rr.error;
        heap.push(Segment { chart: c, a, b, value: rr.value, error: rr.error, seq });
        seq += 1;
    }
    let mut frozen: Vec<Segment> = Vec::new();
    while total_e > tol.target(total_v) && heap.len() + frozen.len() < tol.max_panels {
        let Some(s) = heap.pop() else { break };
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) || (s.b - s.a) <= 8.0 * f64::EPSILON * s.a.abs().max(s.b.abs()) {
            frozen.push(s);
            continue;
        }
        let mut g = |u: f64| eval_chart(f, charts[s.chart], u);
        let l = gk21(&mut g, s.a, mid)?;
        let r = gk21(&mut g, mid, s.b)?;
        total_v += l.value + r.value - s.value;
        total_e += l.error + r.error - s.error;
        heap.push(Segment { chart: s.chart, a: s.a, b: mid, value: l.value, error: l.error, seq });
        heap.push(Segment { chart: s.chart, a: mid, b: s.b, value: r.value, error: r.error, seq: seq + 1 });
        seq += 2;
    }
    let mut all: Vec<Segment> = heap.into_vec();
    all.extend(frozen);
    all.sort_by(|x, y| x.chart.cmp(&y.chart).then(x.a.total_cmp(&y.a)));
    let mut value: f64 = all.iter().map(|s| s.value).sum();
    let mut error: f64 = all.iter().map(|s| s.error).sum();
    value += tails.iter().map(|t| t.value).sum::<f64>();
    error += tails.iter().map(|t| t.error).sum::<f64>();
    Ok(IntegralResult {
        value,
        abs_error: error,
        subdivisions: all.len(),
        converged: error <= tol.target(value),
        fragile,
    })
}

/// Plain adaptive integral of a smooth function on a finite interval.
pub(crate) fn integrate_smooth(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> Result<f64, QuadError> {
    let tol = Tolerance { abs: f64::MIN_POSITIVE, rel, max_panels: 2000 };
    let p = Panel { a, b, left: None, right: None };
    Ok(integrate_panels(&|pt: Point| f(pt.r), &[p], &tol)?.value)
}

fn validate_interval(lo: f64, hi: f64) -> Result<(), QuadError> {
    if lo >= 0.0 && lo < hi && lo.is_finite() && !hi.is_nan() {
        Ok(())
    } else {
        Err(QuadError::InvalidInterval { lo, hi })
    }
}

/// Split `[lo, hi]` at `breakpoints` and attach endpoint annotations to the outer panels.
pub(crate) fn panels_for(
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    annotations: &[SingularityAnnotation],
) -> Result<Vec<Panel>, QuadError> {
    validate_interval(lo, hi)?;
    let mut left = None;
    let mut right = None;
    for a in annotations {
        let end = Some(EndBehavior { lambda: a.lambda, mu: a.mu });
        if a.location == lo {
            left = end;
        } else if a.location == hi {
            right = end;
        } else {
            return Err(QuadError::AnnotationNotAtEndpoint(a.location));
        }
    }
    if hi.is_infinite() && right.is_none() {
        return Err(QuadError::MissingInfiniteAnnotation);
    }
    let mut nodes = vec![lo];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    nodes.extend(inner);
    nodes.push(hi);
    let n = nodes.len() - 1;
    Ok((0..n)
        .map(|i| Panel {
            a: nodes[i],
            b: nodes[i + 1],
            left: if i == 0 { left } else { None },
            right: if i == n - 1 { right } else { None },
        })
        .collect())
}

/// Integrate an arbitrary function over `[lo, hi]`; `hi` may be infinite when annotated.
pub fn integrate_fn(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    annotations: &[SingularityAnnotation],
    tol: &Tolerance,
) -> Result<IntegralResult, QuadError> {
    let panels = panels_for(lo, hi, breakpoints, annotations)?;
    integrate_panels(&|pt: Point| f(pt.r), &panels, tol)
}

/// Integrate an expression in `r` over `[lo, hi]`.
pub fn integrate(
    integrand: &Expr,
    lo: f64,
    hi: f64,
    annotations: &[SingularityAnnotation],
    tol: &Tolerance,
) -> Result<IntegralResult, QuadError> {
    let breaks = expr_breakpoints(integrand);
    integrate_fn(&|r| integrand.eval(r), lo, hi, &breaks, annotations, tol)
}

/// Breakpoints of piecewise nodes whose selector is `r` itself.
fn expr_breakpoints(e: &Expr) -> Vec<f64> {
    let mut out = Vec::new();
    fn walk(e: &Expr, out: &mut Vec<f64>) {
        match e {
            Expr::Piecewise { arg, breaks, pieces } => {
                if **arg == Expr::Var {
                    out.extend(breaks.iter().copied());
                }
                walk(arg, out);
                pieces.iter().for_each(|p| walk(p, out));
            }
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|x| walk(x, out)),
            Expr::Div(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) | Expr::ExpInv(a) => walk(a, out),
            Expr::Step { arg, .. } => walk(arg, out),
            Expr::Const(_) | Expr::Var => {}
        }
    }
    walk(e, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn inverse_square_root_at_zero() {
        let e = Expr::power_of_r(-0.5);
        let r = integrate(&e, 0.0, 1.0, &[SingularityAnnotation::algebraic(0.0, -0.5)], &tol()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{r:?}");
        assert!(r.converged);
        assert!(r.abs_error <= 1e-10 * 2.0);
    }

    #[test]
    fn critical_log_at_zero() {
        // 1/(r log(1/r)^2) on [0, 1/2]
        let e = Expr::div(
            Expr::Const(1.0),
            Expr::mul(vec![Expr::Var, Expr::pow(Expr::log(Expr::div(Expr::Const(1.0), Expr::Var)), 2.0)]),
        );
        let r = integrate(&e, 0.0, 0.5, &[SingularityAnnotation::new(0.0, -1.0, -2.0)], &tol()).unwrap();
        assert!((r.value - 1.0 / 2f64.ln()).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate(&Expr::Const(1.0), 1.0, 2.0, &[], &tol()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn divergent_annotation_rejected() {
        let e = Expr::power_of_r(-1.0);
        let err = integrate(&e, 0.0, 1.0, &[SingularityAnnotation::algebraic(0.0, -1.0)], &tol()).unwrap_err();
        assert!(matches!(err, QuadError::NonIntegrable { .. }));
    }

    #[test]
    fn annotation_must_sit_at_an_endpoint() {
        let err = integrate(&Expr::Var, 0.0, 1.0, &[SingularityAnnotation::algebraic(0.5, 0.0)], &tol()).unwrap_err();
        assert_eq!(err, QuadError::AnnotationNotAtEndpoint(0.5));
    }

    #[test]
    fn half_line_power_decay() {
        // int_1^inf r^{-3} dr = 1/2, decay r^-3 gives lambda = 1 in d = 1/r
        let r = integrate_fn(
            &|r| r.powi(-3),
            1.0,
            f64::INFINITY,
            &[],
            &[SingularityAnnotation::algebraic(f64::INFINITY, 1.0)],
            &tol(),
        )
        .unwrap();
        assert!((r.value - 0.5).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn interior_endpoint_singularity() {
        // int_1^2 (2 - r)^{-0.7} dr = 1/0.3
        let r = integrate_fn(
            &|r| (2.0 - r).powf(-0.7),
            1.0,
            2.0,
            &[],
            &[SingularityAnnotation::algebraic(2.0, -0.7)],
            &tol(),
        )
        .unwrap();
        assert!((r.value - 1.0 / 0.3).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn near_critical_exponent_is_flagged() {
        let lambda = -1.0 + 5e-7;
        let r = integrate_fn(&|r| r.powf(lambda), 0.0, 1.0, &[], &[SingularityAnnotation::algebraic(0.0, lambda)], &tol())
            .unwrap();
        assert!(r.fragile);
        assert!((r.value - 1.0 / (lambda + 1.0)).abs() < 1e-6 / (lambda + 1.0), "{r:?}");
    }

    #[test]
    fn budget_exhaustion_sets_flag() {
        let t = Tolerance { abs: 1e-15, rel: 1e-15, max_panels: 3 };
        let r = integrate_fn(&|r: f64| (50.0 * r).sin().abs(), 0.0, 10.0, &[], &[], &t).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn non_finite_values_carry_the_radius() {
        let err = integrate_fn(&|r: f64| if r > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, &[], &[], &tol()).unwrap_err();
        assert!(matches!(err, QuadError::EvaluationFault { radius, .. } if radius > 0.5));
    }
}
