//! Test corpus: a fixed list of smooth compactly supported profiles and a seeded generator of
//! admissible instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{CatalogError, Family, InequalityInstance, Params};
use crate::model::{Expr, HomogeneousSetting, RadialProfile};

fn bump(lo: f64, hi: f64) -> RadialProfile {
    RadialProfile::bump(lo, hi).expect("corpus windows are valid")
}

/// Named profiles, all smooth with support in `(0, infinity)` bounded away from 0.
pub fn profiles() -> Vec<(&'static str, RadialProfile)> {
    vec![
        ("bump_half_two", bump(0.5, 2.0)),
        ("bump_one_two", bump(1.0, 2.0)),
        ("bump_small", bump(0.1, 0.4)),
        ("bump_large", bump(2.0, 8.0)),
        ("bump_wide", bump(0.05, 20.0)),
        ("bump_narrow", bump(0.9, 1.1)),
        ("r2_bump", bump(0.3, 1.5).times_expr(Expr::power_of_r(2.0))),
        ("inv_r_bump", bump(0.3, 0.9).times_expr(Expr::power_of_r(-1.0))),
        ("two_bumps", bump(0.2, 1.0).add(&bump(0.6, 3.0).scale(0.5))),
        ("exp_decay_bump", bump(0.25, 4.0).times_expr(Expr::exp(Expr::scale(-1.0, Expr::r())))),
        ("log_bump", bump(0.5, 5.0).times_expr(Expr::log(Expr::affine(1.0, 1.0)))),
        ("signed_bump", bump(0.5, 2.0).times_expr(Expr::affine(1.0, -1.0)).scale(3.0)),
    ]
}

/// Lowest and highest homogeneous dimension drawn by [`random_instances`].
pub const Q_RANGE: (f64, f64) = (2.5, 9.0);

struct Draw(ChaCha8Rng);

impl Draw {
    fn u(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.random_range(lo..hi)
    }

    fn sign(&mut self) -> f64 {
        if self.0.random_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    }

    /// Uniform on `[lo, hi)` away from `avoid` by at least `gap`.
    fn u_avoiding(&mut self, lo: f64, hi: f64, avoid: impl Fn(f64) -> f64, gap: f64) -> f64 {
        loop {
            let x = self.u(lo, hi);
            if avoid(x).abs() >= gap {
                return x;
            }
        }
    }
}

fn ckn_params(d: &mut Draw, q_dim: f64, critical: bool) -> Params {
    let p = d.u(1.3, 4.0);
    let q = d.u(1.3, 4.0);
    let delta = match d.0.random_range(0..8) {
        0 => 0.0,
        1 => 1.0,
        _ => d.u(0.0, 1.0),
    };
    let r = 1.0 / (delta / p + (1.0 - delta) / q);
    let a = if critical { 1.0 - q_dim / p } else { d.u_avoiding(-1.0, 1.5, |a| q_dim - p * (1.0 - a), 0.3) };
    let b = d.u(-1.0, 1.0);
    Params { p: Some(p), q: Some(q), r: Some(r), delta: Some(delta), a: Some(a), b: Some(b), ..Default::default() }
}

fn log_params(d: &mut Draw, p: f64) -> Params {
    let gamma = d.u(1.2, (p + 1.0).min(4.0));
    Params { p: Some(p), gamma: Some(gamma), big_r: Some(d.u(0.3, 5.0)), ..Default::default() }
}

fn superweight_params(d: &mut Draw, q_dim: f64, k: f64) -> Params {
    let p = d.u(1.3, 4.0);
    let alpha = d.sign() * d.u(0.5, 3.0);
    let beta = d.sign() * d.u(0.3, 2.0);
    let ab = alpha * beta;
    let slack = if ab < 0.0 { ab } else { 0.0 };
    let top = (q_dim - p + slack) / p;
    let m = top - (k - 1.0) - d.u(0.0, 2.0);
    Params {
        p: Some(p),
        a: Some(d.u(0.2, 3.0)),
        b: Some(d.u(0.2, 3.0)),
        alpha: Some(alpha),
        beta: Some(beta),
        m: Some(m),
        k: (k > 1.0).then_some(k),
        ..Default::default()
    }
}

fn draw_params(d: &mut Draw, family: Family, q_dim: f64) -> Params {
    match family {
        Family::ExtendedCKN => ckn_params(d, q_dim, false),
        Family::ExtendedCKNCritical => ckn_params(d, q_dim, true),
        Family::EulerHardy => {
            let p = d.u(1.3, 4.0);
            let alpha = d.u_avoiding(-2.0, 3.0, |a| a * p - q_dim, 0.3);
            Params { p: Some(p), alpha: Some(alpha), ..Default::default() }
        }
        Family::EulerHardyCritical => Params { p: Some(d.u(1.3, 4.0)), ..Default::default() },
        Family::AnisotropicCKN => {
            Params { p: Some(d.u(1.3, 4.0)), a: Some(d.u(-1.0, 2.0)), b: Some(d.u(-1.0, 2.0)), ..Default::default() }
        }
        Family::RemainderHardy | Family::StabilityHardy => {
            let p = 2.0 + d.u(0.0, 0.9) * (q_dim.min(5.0) - 2.0);
            let alpha = d.u(-1.0, 0.9 * (q_dim - p) / p);
            let b = (family == Family::RemainderHardy).then(|| d.u(-1.0, 3.0));
            Params { p: Some(p), alpha: Some(alpha), b, ..Default::default() }
        }
        Family::CriticalLogHardy => {
            let p = d.u(1.3, 5.0);
            log_params(d, p)
        }
        Family::UncertaintyA => {
            let p = d.u(2.2, 6.0);
            Params { q: Some(2.0 * p / (p - 2.0)), ..log_params(d, p) }
        }
        Family::UncertaintyB => {
            let p = d.u(1.3, 5.0);
            log_params(d, p)
        }
        Family::Superweight => superweight_params(d, q_dim, 1.0),
        Family::SuperweightHigherOrder => {
            let k = d.0.random_range(2..=3) as f64;
            superweight_params(d, q_dim, k)
        }
    }
}

/// `per_family` admissible instances of every family, reproducible from `seed`, with `Q`
/// drawn from [`Q_RANGE`].
pub fn random_instances(seed: u64, per_family: usize) -> Result<Vec<InequalityInstance>, CatalogError> {
    let mut d = Draw(ChaCha8Rng::seed_from_u64(seed));
    let mut out = Vec::with_capacity(per_family * Family::ALL.len());
    for _ in 0..per_family {
        for family in Family::ALL {
            let q_dim = d.u(Q_RANGE.0, Q_RANGE.1);
            let params = draw_params(&mut d, family, q_dim);
            let setting = HomogeneousSetting::with_sigma(q_dim, d.u(0.5, 10.0))?;
            out.push(InequalityInstance::new(family, params, setting)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Support;

    #[test]
    fn profiles_are_compact_away_from_zero() {
        let all = profiles();
        assert!(all.len() >= 10);
        for (name, f) in all {
            match f.support() {
                Support::Compact { lo, hi } => assert!(lo > 0.0 && hi > lo, "{name}"),
                Support::Whole => panic!("{name}"),
            }
        }
    }

    #[test]
    fn generator_is_reproducible_and_admissible() {
        let a = random_instances(7, 5).unwrap();
        let b = random_instances(7, 5).unwrap();
        assert_eq!(a.len(), 60);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.params(), y.params());
            assert!(x.setting().q() >= Q_RANGE.0 && x.setting().q() < Q_RANGE.1);
        }
        for family in Family::ALL {
            assert_eq!(a.iter().filter(|i| i.family() == family).count(), 5);
        }
    }
}
