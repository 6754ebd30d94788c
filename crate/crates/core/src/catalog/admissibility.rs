use serde::Serialize;

use super::{Family, Params};
use crate::model::HomogeneousSetting;

/// Whether the classical CKN positivity conditions `1/p + a/Q > 0`, `1/q + b/Q > 0`,
/// `1/r + c/Q > 0` hold for an extended CKN instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalStatus {
    SatisfiesClassical,
    ViolatesClassical,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    pub failed_conditions: Vec<String>,
    pub classical_ckn_status: ClassicalStatus,
}

const EQ_TOL: f64 = 1e-12;

pub(crate) fn is_critical_ckn(q_dim: f64, p: f64, a: f64) -> bool {
    (q_dim - p * (1.0 - a)).abs() <= EQ_TOL * q_dim.abs().max(1.0)
}

struct Checker<'a> {
    params: &'a Params,
    failed: Vec<String>,
}

impl Checker<'_> {
    fn need(&mut self, name: &'static str) -> Option<f64> {
        match self.params.get(name) {
            Ok(v) => Some(v),
            Err(_) => {
                self.failed.push(format!("missing parameter {name}"));
                None
            }
        }
    }

    fn require(&mut self, ok: bool, name: &str) {
        if !ok {
            self.failed.push(name.to_string());
        }
    }
}

/// Check the hypotheses of a family; failures are collected, never raised.
pub fn validate(family: Family, params: &Params, setting: &HomogeneousSetting) -> AdmissibilityVerdict {
    let mut ck = Checker { params, failed: Vec::new() };
    let mut classical = ClassicalStatus::NotApplicable;
    if params.all().iter().any(|(_, v)| v.is_some_and(|x| !x.is_finite())) {
        ck.failed.push("parameters must be finite".into());
        return AdmissibilityVerdict { admissible: false, failed_conditions: ck.failed, classical_ckn_status: classical };
    }
    let q_dim = match params.q_override {
        Some(q) if q > 1.0 => q,
        Some(_) => {
            ck.failed.push("Q > 1".into());
            return AdmissibilityVerdict { admissible: false, failed_conditions: ck.failed, classical_ckn_status: classical };
        }
        None => setting.q(),
    };
    match family {
        Family::ExtendedCKN | Family::ExtendedCKNCritical => {
            let (p, q, r, delta, a, b) =
                (ck.need("p"), ck.need("q"), ck.need("r"), ck.need("delta"), ck.need("a"), ck.need("b"));
            if let (Some(p), Some(q), Some(r), Some(delta), Some(a), Some(b)) = (p, q, r, delta, a, b) {
                ck.require(p > 1.0, "1 < p < inf");
                ck.require(q > 1.0, "1 < q < inf");
                ck.require(r > 0.0, "0 < r < inf");
                ck.require(p + q >= r, "p+q >= r");
                ck.require((0.0..=1.0).contains(&delta), "delta in [0,1]");
                if r > 0.0 {
                    ck.require(
                        delta >= (r - q) / r - EQ_TOL && delta <= p / r + EQ_TOL,
                        "delta in [(r-q)/r, p/r]",
                    );
                    ck.require(
                        (delta * r / p + (1.0 - delta) * r / q - 1.0).abs() <= EQ_TOL,
                        "delta r/p + (1-delta) r/q = 1",
                    );
                }
                let c_formula = delta * (a - 1.0) + b * (1.0 - delta);
                if let Some(c) = params.c {
                    ck.require((c - c_formula).abs() <= EQ_TOL * (1.0 + c.abs()), "c = delta(a-1) + b(1-delta)");
                }
                let c = params.c.unwrap_or(c_formula);
                let critical = is_critical_ckn(q_dim, p, a);
                if family == Family::ExtendedCKN {
                    ck.require(!critical, "Q != p(1-a)");
                } else {
                    ck.require(critical, "Q = p(1-a)");
                }
                let satisfies = 1.0 / p + a / q_dim > 0.0 && 1.0 / q + b / q_dim > 0.0 && 1.0 / r + c / q_dim > 0.0;
                classical = if satisfies { ClassicalStatus::SatisfiesClassical } else { ClassicalStatus::ViolatesClassical };
            }
        }
        Family::EulerHardy => {
            if let (Some(p), Some(alpha)) = (ck.need("p"), ck.need("alpha")) {
                ck.require(p > 1.0, "1 < p < inf");
                ck.require((alpha * p - q_dim).abs() > EQ_TOL * q_dim, "alpha p != Q");
            }
        }
        Family::EulerHardyCritical => {
            if let Some(p) = ck.need("p") {
                ck.require(p > 1.0, "1 < p < inf");
                if let Some(alpha) = params.alpha {
                    ck.require((alpha * p - q_dim).abs() <= EQ_TOL * q_dim, "alpha p = Q");
                }
            }
        }
        Family::AnisotropicCKN => {
            if let (Some(p), Some(_), Some(_)) = (ck.need("p"), ck.need("a"), ck.need("b")) {
                ck.require(p > 1.0, "1 < p < inf");
            }
        }
        Family::RemainderHardy | Family::StabilityHardy => {
            let p = ck.need("p");
            let alpha = ck.need("alpha");
            if family == Family::RemainderHardy {
                ck.need("b");
            }
            if let (Some(p), Some(alpha)) = (p, alpha) {
                ck.require(p >= 2.0 && p < q_dim, "2 <= p < Q");
                ck.require(alpha < (q_dim - p) / p, "alpha < (Q-p)/p");
            }
        }
        Family::CriticalLogHardy | Family::UncertaintyA | Family::UncertaintyB => {
            let (p, gamma, big_r) = (ck.need("p"), ck.need("gamma"), ck.need("R"));
            if let (Some(p), Some(gamma), Some(big_r)) = (p, gamma, big_r) {
                ck.require(gamma > 1.0, "1 < gamma < inf");
                ck.require(p > 1.0f64.max(gamma - 1.0), "max(1, gamma-1) < p < inf");
                ck.require(big_r > 0.0, "R > 0");
                if family == Family::UncertaintyA {
                    if let Some(q) = ck.need("q") {
                        ck.require(p > 2.0, "p > 2");
                        ck.require(q > 1.0, "q > 1");
                        ck.require((1.0 / p + 1.0 / q - 0.5).abs() <= EQ_TOL, "1/p + 1/q = 1/2");
                    }
                }
                if family == Family::UncertaintyB {
                    if let Some(q) = params.q {
                        ck.require((1.0 / p + 1.0 / q - 1.0).abs() <= EQ_TOL, "1/p + 1/p' = 1");
                    }
                }
            }
        }
        Family::Superweight | Family::SuperweightHigherOrder => {
            let (p, a, b, alpha, beta, m) =
                (ck.need("p"), ck.need("a"), ck.need("b"), ck.need("alpha"), ck.need("beta"), ck.need("m"));
            let k = if family == Family::SuperweightHigherOrder { ck.need("k") } else { Some(1.0) };
            if let (Some(p), Some(a), Some(b), Some(alpha), Some(beta), Some(m), Some(k)) = (p, a, b, alpha, beta, m, k) {
                ck.require(p > 1.0, "1 < p < inf");
                ck.require(a > 0.0, "a > 0");
                ck.require(b > 0.0, "b > 0");
                ck.require(k >= 1.0 && k == k.trunc(), "k positive integer");
                let ab = alpha * beta;
                ck.require(ab != 0.0, "alpha beta != 0");
                // the iterated inequality needs every intermediate order to satisfy the first-order
                // hypothesis, which reduces to the top one
                let top = m + k - 1.0;
                let (lhs, name) = if family == Family::Superweight {
                    (p * m, if ab < 0.0 { "p m - alpha beta <= Q - p" } else { "p m <= Q - p" })
                } else {
                    (p * top, if ab < 0.0 { "p(m+k-1) - alpha beta <= Q - p" } else { "p(m+k-1) <= Q - p" })
                };
                if ab > 0.0 {
                    ck.require(lhs <= q_dim - p, name);
                } else if ab < 0.0 {
                    ck.require(lhs - ab <= q_dim - p, name);
                }
            }
        }
    }
    AdmissibilityVerdict {
        admissible: ck.failed.is_empty(),
        failed_conditions: ck.failed,
        classical_ckn_status: classical,
    }
}
