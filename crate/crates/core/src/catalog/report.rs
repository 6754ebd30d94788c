use serde::Serialize;

use super::Family;
use crate::quadrature::Measured;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

/// Which way the inequality points once the constant is attached to the right side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `lhs <= constant * rhs`
    #[serde(rename = "<=")]
    LessEq,
    /// `lhs >= constant * rhs`
    #[serde(rename = ">=")]
    GreaterEq,
}

/// Outcome of evaluating both sides of one inequality on one profile.
///
/// `margin` is the slack (positive when the inequality holds) and `ratio` is at most 1 when it
/// holds, whatever the direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub family: Family,
    pub direction: Direction,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub ratio: f64,
    pub margin: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    /// Absolute error estimate of every integral that was computed, in evaluation order.
    pub quadrature_errors: Vec<f64>,
    pub budget: f64,
    pub verdict: Verdict,
    pub fragile: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub(crate) fn from_sides(
        family: Family,
        direction: Direction,
        lhs: Measured,
        rhs: Measured,
        constant: f64,
        trace: Trace,
    ) -> Self {
        let scaled = constant * rhs.value;
        let (margin, ratio) = match direction {
            Direction::LessEq => (scaled - lhs.value, quotient(lhs.value, scaled)),
            Direction::GreaterEq => (lhs.value - scaled, quotient(scaled, lhs.value)),
        };
        let budget = 2.0 * (lhs.err + constant.abs() * rhs.err) + 1e-12 * lhs.value.abs().max(scaled.abs());
        let verdict = if !(margin.is_finite() && budget.is_finite()) {
            Verdict::Inconclusive
        } else if margin >= -budget {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        let mut notes = trace.notes;
        if verdict == Verdict::Inconclusive {
            notes.push("non-finite side or error estimate".into());
        }
        Self {
            family,
            direction,
            lhs: lhs.value,
            rhs: rhs.value,
            constant,
            ratio,
            margin,
            lhs_error: lhs.err,
            rhs_error: rhs.err,
            quadrature_errors: trace.errors,
            budget,
            verdict,
            fragile: trace.fragile,
            notes,
        }
    }

    pub(crate) fn inconclusive(family: Family, direction: Direction, constant: f64, trace: Trace, reason: String) -> Self {
        let mut notes = trace.notes;
        notes.push(reason);
        Self {
            family,
            direction,
            lhs: f64::NAN,
            rhs: f64::NAN,
            constant,
            ratio: f64::NAN,
            margin: f64::NAN,
            lhs_error: f64::NAN,
            rhs_error: f64::NAN,
            quadrature_errors: trace.errors,
            budget: f64::NAN,
            verdict: Verdict::Inconclusive,
            fragile: trace.fragile,
            notes,
        }
    }
}

fn quotient(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Bookkeeping shared by the evaluators: per-integral errors, fragility, free-form notes.
#[derive(Debug, Clone, Default)]
pub(crate) struct Trace {
    pub errors: Vec<f64>,
    pub fragile: bool,
    pub notes: Vec<String>,
}
