use rayon::prelude::*;
use serde::Serialize;

use super::family::{log_hardy_quadrature, Anchor, ExtremizerFamily};
use super::SharpnessError;
use crate::catalog::{sharp_constant, Family, InequalityInstance};
use crate::model::{LogKind, RadialProfile, Superweight, WeightSpec};
use crate::quadrature::{weighted_integral, Tolerance};

/// Extrapolation model for the ratio sequence in the slow variable `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `(c L + A)/(L + B)`: both integrals of the log-Hardy family are affine in `L`.
    Mobius,
    /// `c + B/L^2`: for windowed powers the `1/L` terms of the two cutoffs cancel.
    InverseSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    /// `(index, ratio)` with ratio = gradient-side integral / function-side integral.
    pub ratios: Vec<(f64, f64)>,
    pub slow_variable: Vec<f64>,
    pub model: FitModel,
    pub extrapolated_limit: f64,
    pub target: f64,
    pub relative_gap: f64,
    /// Largest fit residual relative to the largest ratio.
    pub fit_residual: f64,
    /// No ratio falls below the target, as the inequality requires.
    pub sound: bool,
}

/// The extremizer family matching an instance's sharpness argument.
pub fn natural_family(inst: &InequalityInstance) -> Result<ExtremizerFamily, SharpnessError> {
    let q = inst.setting().q();
    let get = |n: &'static str| inst.params().get(n).map_err(|_| SharpnessError::InvalidParameters(n.into()));
    match inst.family() {
        Family::CriticalLogHardy => super::log_hardy_family(get("gamma")?, get("p")?, get("R")?),
        Family::EulerHardy => {
            let (p, alpha) = (get("p")?, get("alpha")?);
            Ok(ExtremizerFamily::TruncatedPower {
                exponent: -(q - alpha * p) / p,
                anchor_radius: 1.0,
                anchor: Anchor::Center,
            })
        }
        Family::EulerHardyCritical => Ok(ExtremizerFamily::TruncatedLogPower { exponent: -1.0 / get("p")? }),
        Family::Superweight => {
            let (a, b, alpha, beta) = (get("a")?, get("b")?, get("alpha")?, get("beta")?);
            let k = sharp_constant(inst).value;
            // put the window where the superweight is a pure power: a + b r^alpha ~ a in case (i),
            // ~ b r^alpha in case (ii), to relative 1e-8
            let (radius, grows_up) = if alpha * beta > 0.0 {
                ((1e-8 * a / b).powf(1.0 / alpha), alpha < 0.0)
            } else {
                ((1e8 * a / b).powf(1.0 / alpha), alpha > 0.0)
            };
            Ok(ExtremizerFamily::TruncatedPower {
                exponent: -k,
                anchor_radius: radius,
                anchor: if grows_up { Anchor::Lower } else { Anchor::Upper },
            })
        }
        other => Err(SharpnessError::UnsupportedProbe { family: other.name().into(), kind: "any".into() }),
    }
}

/// Limit of the gradient/function ratio implied by the sharp constant.
fn target(inst: &InequalityInstance) -> f64 {
    let k = sharp_constant(inst).value;
    let p = inst.params().p.unwrap_or(1.0);
    match inst.family() {
        Family::Superweight => k.powf(p),
        _ => k.powf(-p),
    }
}

pub fn probe(inst: &InequalityInstance, family: &ExtremizerFamily, indices: &[f64]) -> Result<ProbeResult, SharpnessError> {
    probe_with(inst, family, indices, &Tolerance::from_env())
}

pub fn probe_with(
    inst: &InequalityInstance,
    family: &ExtremizerFamily,
    indices: &[f64],
    tol: &Tolerance,
) -> Result<ProbeResult, SharpnessError> {
    if indices.len() < 3 {
        return Err(SharpnessError::TooFewIndices(indices.len()));
    }
    if indices.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SharpnessError::UnsortedIndices);
    }
    check_pairing(inst, family)?;
    let ratios: Vec<f64> = indices
        .par_iter()
        .map(|&j| ratio_at(inst, family, j, tol))
        .collect::<Result<_, _>>()?;
    let slow: Vec<f64> = indices.iter().map(|&j| family.slow_variable(j)).collect();
    let model = match family {
        ExtremizerFamily::LogHardyFk { .. } => FitModel::Mobius,
        _ => FitModel::InverseSquare,
    };
    let (limit, residual) = fit(model, &slow, &ratios)?;
    let target = target(inst);
    let sound = ratios.iter().all(|r| *r >= target * (1.0 - 1e-8));
    Ok(ProbeResult {
        ratios: indices.iter().copied().zip(ratios).collect(),
        slow_variable: slow,
        model,
        extrapolated_limit: limit,
        target,
        relative_gap: (limit - target).abs() / target.abs(),
        fit_residual: residual,
        sound,
    })
}

fn check_pairing(inst: &InequalityInstance, family: &ExtremizerFamily) -> Result<(), SharpnessError> {
    let ok = match (inst.family(), family) {
        (Family::CriticalLogHardy, ExtremizerFamily::LogHardyFk { gamma, p, big_r }) => {
            inst.params().gamma == Some(*gamma) && inst.params().p == Some(*p) && inst.params().big_r == Some(*big_r)
        }
        (Family::EulerHardy | Family::Superweight, ExtremizerFamily::TruncatedPower { .. }) => true,
        (Family::EulerHardyCritical, ExtremizerFamily::TruncatedLogPower { .. }) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(SharpnessError::UnsupportedProbe { family: inst.family().name().into(), kind: family.kind_name().into() })
    }
}

fn ratio_at(inst: &InequalityInstance, family: &ExtremizerFamily, index: f64, tol: &Tolerance) -> Result<f64, SharpnessError> {
    let setting = inst.setting();
    let params = inst.params();
    let p = params.p.expect("validated");
    if let ExtremizerFamily::LogHardyFk { gamma, p, big_r } = *family {
        let (fun, grad) = log_hardy_quadrature(index, gamma, p, big_r, setting, tol)?;
        return Ok(grad / fun);
    }
    let f = family.profile(index)?;
    let q = setting.q();
    let (grad_profile, wg, wf): (RadialProfile, WeightSpec, WeightSpec) = match inst.family() {
        Family::EulerHardy => {
            let w = WeightSpec::power(-params.alpha.expect("validated"));
            (f.euler(), w, w)
        }
        Family::EulerHardyCritical => {
            let w = WeightSpec::power(-q / p);
            (f.euler(), w.with_log(LogKind::AbsLog, 1.0)?, w)
        }
        Family::Superweight => {
            let v = |n: Option<f64>| n.expect("validated");
            let sw = Superweight::new(v(params.a), v(params.b), v(params.alpha), v(params.beta))?;
            let m = v(params.m);
            (
                f.derivative(1)?,
                WeightSpec::power(-m).with_superweight(sw),
                WeightSpec::power(-(m + 1.0)).with_superweight(sw),
            )
        }
        _ => unreachable!("pairing checked"),
    };
    let grad = weighted_integral(&grad_profile, &wg, p, setting, tol)?;
    let fun = weighted_integral(&f, &wf, p, setting, tol)?;
    if !(grad.converged && fun.converged) {
        return Err(SharpnessError::NotConverged(index));
    }
    Ok(grad.value / fun.value)
}

/// Least-squares fit; returns the limit `c` and the relative residual.
fn fit(model: FitModel, l: &[f64], rho: &[f64]) -> Result<(f64, f64), SharpnessError> {
    let scale = rho.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    match model {
        FitModel::Mobius => {
            // rho (L + B) = c L + A  =>  rho L = c L + A - B rho
            let rows: Vec<[f64; 3]> = l.iter().zip(rho).map(|(l, r)| [*l, 1.0, -r]).collect();
            let rhs: Vec<f64> = l.iter().zip(rho).map(|(l, r)| l * r).collect();
            let [c, a, b] = least_squares::<3>(&rows, &rhs)?;
            let res = l.iter().zip(rho).map(|(l, r)| ((c * l + a) / (l + b) - r).abs()).fold(0.0, f64::max);
            Ok((c, res / scale))
        }
        FitModel::InverseSquare => {
            let rows: Vec<[f64; 2]> = l.iter().map(|l| [1.0, 1.0 / (l * l)]).collect();
            let [c, b] = least_squares::<2>(&rows, rho)?;
            let res = l.iter().zip(rho).map(|(l, r)| (c + b / (l * l) - r).abs()).fold(0.0, f64::max);
            Ok((c, res / scale))
        }
    }
}

/// Solves the normal equations with partial pivoting.
fn least_squares<const N: usize>(rows: &[[f64; N]], rhs: &[f64]) -> Result<[f64; N], SharpnessError> {
    let mut m = [[0.0; N]; N];
    let mut v = [0.0; N];
    for (row, y) in rows.iter().zip(rhs) {
        for i in 0..N {
            v[i] += row[i] * y;
            for j in 0..N {
                m[i][j] += row[i] * row[j];
            }
        }
    }
    for col in 0..N {
        let piv = (col..N).max_by(|a, b| m[*a][col].abs().total_cmp(&m[*b][col].abs())).expect("non-empty");
        if m[piv][col].abs() < 1e-300 {
            return Err(SharpnessError::SingularFit);
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for r in col + 1..N {
            let f = m[r][col] / m[col][col];
            #[allow(clippy::needless_range_loop)]
            for c in col..N {
                m[r][c] -= f * m[col][c];
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let s: f64 = (i + 1..N).map(|j| m[i][j] * x[j]).sum();
        x[i] = (v[i] - s) / m[i][i];
    }
    Ok(x)
}
