//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use hardylab::batch::{parse_config, run, ItemStatus, RunReport, Selection};
use hardylab::catalog::{
    default_r_grid, evaluate_sides, evaluate_sides_with, holder_log_power, holder_mixed_power, holder_power, remainder_check,
    sharp_constant, stability_check, uncertainty_check, Family, HolderSides, InequalityInstance, Params,
    UncertaintyVariant, Verdict,
};
use hardylab::corpus::{profiles, random_instances};
use hardylab::model::{Expr, HomogeneousSetting, RadialProfile, Support};
use hardylab::quadrature::Tolerance;
use hardylab::sharpness::{
    frs_constant, log_hardy_closed_forms, log_hardy_quadrature, natural_family, probe_with,
};
use hardylab::transforms::{crit_subcrit_identity_check, CritSubcritContext};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()))
}

fn setting(q: f64) -> HomogeneousSetting {
    HomogeneousSetting::new(q).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// 1: c_2 = 1 exactly, c_3 against a dense grid minimum of the defining function
fn frs() -> Outcome {
    let start = Instant::now();
    let c2 = frs_constant(2.0).map_err(|e| e.to_string())?;
    let c3 = frs_constant(3.0).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let n = 1_000_000;
    let oracle = (1..=n)
        .map(|i| {
            let t = 0.5 * i as f64 / n as f64;
            (1.0 - t).powi(3) - t.powi(3) + 3.0 * t * t
        })
        .fold(f64::INFINITY, f64::min);
    let closed = 2.0 - 2f64.sqrt();
    ensure((c2 - 1.0).abs() <= 1e-12, || format!("c_2 = {c2}"))?;
    ensure((c3 - oracle).abs() <= 1e-8, || format!("c_3 = {c3}, grid oracle {oracle}"))?;
    ensure((c3 - closed).abs() <= 1e-8, || format!("c_3 = {c3}, 2 - sqrt 2 = {closed}"))?;
    within(elapsed, 1.0)?;
    Ok(format!("c_2 = {c2}, c_3 = {c3:.15}, grid oracle {oracle:.15}"))
}

// 2: random admissible instances of every family against the profile corpus
fn corpus_sweep() -> Outcome {
    let start = Instant::now();
    let instances = random_instances(2024, 5).map_err(|e| e.to_string())?;
    let corpus = profiles();
    for family in Family::ALL {
        ensure(instances.iter().any(|i| i.family() == family), || format!("{family:?} not sampled"))?;
    }
    let mut worst = 0f64;
    for inst in &instances {
        for (name, f) in &corpus {
            let rep = evaluate_sides(inst, f).map_err(|e| format!("{:?} {:?} on {name}: {e}", inst.family(), inst.params()))?;
            ensure(rep.verdict == Verdict::Holds && rep.ratio <= 1.0 + 1e-6, || {
                format!("{:?} {:?} on {name}: {:?}, ratio {}", inst.family(), inst.params(), rep.verdict, rep.ratio)
            })?;
            worst = worst.max(rep.ratio);
        }
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!("{} instances x {} profiles hold, largest ratio {worst:.6}", instances.len(), corpus.len()))
}

// 3: dilation invariance of the extended CKN ratio. Dilation by 7 in dimension up to 9 shrinks
// the integrals by up to 7^-9, so the absolute floor of the default tolerance is dropped.
fn ckn_scaling() -> Outcome {
    let tol = Tolerance { abs: f64::MIN_POSITIVE, rel: 1e-10, max_panels: 10_000 };
    let instances: Vec<InequalityInstance> = random_instances(31, 20)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|i| i.family() == Family::ExtendedCKN)
        .collect();
    ensure(instances.len() == 20, || format!("{} instances", instances.len()))?;
    let corpus = profiles();
    let mut worst = 0f64;
    for (i, inst) in instances.iter().enumerate() {
        let f = &corpus[i % corpus.len()].1;
        let base = evaluate_sides_with(inst, f, &tol).map_err(|e| e.to_string())?.ratio;
        for lambda in [1.0 / 3.0, 7.0] {
            let scaled = evaluate_sides_with(inst, &f.dilate(lambda).unwrap(), &tol).map_err(|e| e.to_string())?.ratio;
            let change = rel(scaled, base);
            ensure(change < 1e-8, || format!("{:?}, lambda {lambda}: ratio {base} -> {scaled}", inst.params()))?;
            worst = worst.max(change);
        }
    }
    Ok(format!("20 instances, largest relative change {worst:.2e}"))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn max_gap(rows: &[HolderSides]) -> f64 {
    rows.iter().map(HolderSides::relative_gap).fold(0.0, f64::max)
}

// 4: pointwise Hölder equality cases
fn holder() -> Outcome {
    let wide = log_grid(1e-3, 1e3, 241);
    let logs = log_grid(2.0, 1e3, 241);
    let mut worst = 0f64;
    for (c, alpha, p) in [(-1.5, 0.3, 2.0), (2.0, -1.0, 3.5), (-0.25, 0.0, 1.5), (0.7, 1.2, 4.0)] {
        worst = worst.max(max_gap(&holder_power(c, alpha, p, &wide).map_err(|e| e.to_string())?));
    }
    for (c, q, p) in [(-0.5, 4.0, 2.0), (1.3, 3.0, 3.0), (-1.0 / 3.0, 6.0, 3.0)] {
        worst = worst.max(max_gap(&holder_log_power(c, q, p, &logs).map_err(|e| e.to_string())?));
    }
    for (p, q, a, b) in [(2.0, 3.0, 0.2, -0.4), (3.0, 1.5, -0.5, 0.5), (4.0, 2.0, 0.0, 1.0)] {
        worst = worst.max(max_gap(&holder_mixed_power(p, q, a, b, &wide).map_err(|e| e.to_string())?));
    }
    ensure(worst <= 1e-12, || format!("largest relative gap {worst:.2e}"))?;
    Ok(format!("10 identities x 241 radii, largest relative gap {worst:.2e}"))
}

fn log_hardy_instance(gamma: f64, p: f64, q: f64) -> InequalityInstance {
    let params = Params { p: Some(p), gamma: Some(gamma), big_r: Some(1.0), ..Default::default() };
    InequalityInstance::new(Family::CriticalLogHardy, params, setting(q)).unwrap()
}

// 5: f_k closed forms and the extrapolated log-Hardy ratio
fn log_hardy_sharpness() -> Outcome {
    let start = Instant::now();
    let tol = Tolerance::default();
    let ks = [1e2, 1e4, 1e6, 1e8];
    let mut worst = 0f64;
    let mut limits = Vec::new();
    // literal value quoted for (3, 4) alongside the formula; the formula gives (2/4)^4 = 1/16
    for (gamma, p, quoted) in [(2.0, 2.0, 0.25), (3.0, 4.0, 1.0 / 32.0)] {
        let s = setting(3.0);
        for k in ks {
            let (lc, rc) = log_hardy_closed_forms(k, gamma, p, 1.0, &s).map_err(|e| e.to_string())?;
            let (lq, rq) = log_hardy_quadrature(k, gamma, p, 1.0, &s, &tol).map_err(|e| e.to_string())?;
            let gap = rel(lq, lc).max(rel(rq, rc));
            ensure(gap < 1e-6, || format!("gamma {gamma}, p {p}, k {k}: closed ({lc}, {rc}) vs quadrature ({lq}, {rq})"))?;
            worst = worst.max(gap);
        }
        let formula = ((gamma - 1.0) / p).powf(p);
        let inst = log_hardy_instance(gamma, p, 3.0);
        let family = natural_family(&inst).map_err(|e| e.to_string())?;
        let res = probe_with(&inst, &family, &ks, &tol).map_err(|e| e.to_string())?;
        let gap = rel(res.extrapolated_limit, formula);
        ensure(gap < 0.02, || format!("(gamma {gamma}, p {p}) limit {} vs {formula}", res.extrapolated_limit))?;
        limits.push(format!(
            "(gamma {gamma}, p {p}) limit {:.6} vs ((gamma-1)/p)^p = {formula} (gap {gap:.1e}; quoted {quoted}, gap {:.2})",
            res.extrapolated_limit,
            rel(res.extrapolated_limit, quoted)
        ));
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("closed forms within {worst:.1e}; {}", limits.join("; ")))
}

// 6: truncated powers drive the superweight ratio to K^p; the gap is taken on the limit
// extrapolated from half-widths 10^2..10^6
fn superweight_sharpness() -> Outcome {
    let tol = Tolerance::default();
    let (q, p) = (5.0, 2.0);
    let mut lines = Vec::new();
    for (alpha, beta, m) in [(1.0, 1.0, 1.0), (1.0, -1.0, 0.5), (-2.0, 0.5, 0.5), (2.0, -0.5, 0.2)] {
        let ab: f64 = alpha * beta;
        let expected = if ab > 0.0 { (q - p * m - p) / p } else { (q - p * m + ab - p) / p };
        let params = Params {
            p: Some(p),
            a: Some(1.0),
            b: Some(1.0),
            alpha: Some(alpha),
            beta: Some(beta),
            m: Some(m),
            ..Default::default()
        };
        let inst = InequalityInstance::new(Family::Superweight, params, setting(q)).unwrap();
        let k = sharp_constant(&inst).value;
        ensure(rel(k, expected) < 1e-14, || format!("constant {k} vs {expected}"))?;
        let family = natural_family(&inst).map_err(|e| e.to_string())?;
        let res = probe_with(&inst, &family, &[2.0, 3.0, 4.0, 5.0, 6.0], &tol).map_err(|e| e.to_string())?;
        let at6 = res.ratios.last().unwrap().1;
        ensure(res.sound && res.relative_gap < 0.02, || {
            format!("(alpha {alpha}, beta {beta}, m {m}): limit {} vs K^p = {}", res.extrapolated_limit, res.target)
        })?;
        lines.push(format!(
            "(alpha {alpha}, beta {beta}): K {expected:.6}, extrapolated K {:.6} (gap {:.1e}), raw ratio^(1/p) at 10^6 {:.4}",
            res.extrapolated_limit.powf(1.0 / p),
            res.relative_gap,
            at6.powf(1.0 / p)
        ));
    }
    Ok(lines.join("; "))
}

// 7: remainder estimate on ten profiles and four b values
fn remainder() -> Outcome {
    let corpus = profiles();
    let mut count = 0;
    for (p, q, alpha) in [(2.0, 4.0, 0.0), (3.0, 5.0, 0.1)] {
        let s = setting(q);
        let critical_b = q * (p - 1.0) / p;
        for b in [0.0, critical_b, -1.0, 2.0] {
            for (name, f) in corpus.iter().take(10) {
                let rep = remainder_check(p, alpha, b, f, &s).map_err(|e| format!("{name}, b {b}: {e}"))?;
                ensure(rep.verdict == Verdict::Holds, || format!("(p {p}, Q {q}, alpha {alpha}, b {b}) on {name}: {rep:?}"))?;
                if b == critical_b {
                    ensure(rep.rhs == 0.0, || format!("b = Q(p-1)/p gives rhs {}", rep.rhs))?;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} checks hold, rhs exactly 0 at b = Q(p-1)/p"))
}

/// `r^(-kappa)` on `[e^-w, e^w]` with cutoffs of relative width `tau`.
fn truncated_extremal(kappa: f64, w: f64, tau: f64) -> RadialProfile {
    let (lo, hi) = ((-w).exp(), w.exp());
    let e = Expr::mul(vec![
        Expr::power_of_r(-kappa),
        Expr::step(Expr::Var, lo, lo * (1.0 + tau)),
        Expr::sub(Expr::c(1.0), Expr::step(Expr::Var, hi * (1.0 - tau), hi)),
    ]);
    RadialProfile::new(e, Support::Compact { lo, hi }, vec![lo * (1.0 + tau), hi * (1.0 - tau)]).unwrap()
}

// 8: stability estimate on the corpus and near an extremal
fn stability() -> Outcome {
    let corpus = profiles();
    let mut count = 0;
    for (p, q, alpha) in [(2.0, 4.0, 0.0), (3.0, 5.0, 0.1), (2.5, 7.0, -0.5)] {
        let s = setting(q);
        for (name, f) in &corpus {
            let grid = default_r_grid(f).map_err(|e| e.to_string())?;
            let rep = stability_check(f, alpha, p, &grid, &s).map_err(|e| format!("{name}: {e}"))?;
            ensure(rep.verdict == Verdict::Holds, || format!("(p {p}, Q {q}, alpha {alpha}) on {name}: {rep:?}"))?;
            count += 1;
        }
    }
    let mut worst = 0f64;
    for (p, q, alpha) in [(2.0, 4.0, 0.0), (3.0, 5.0, 0.1)] {
        let kappa = (q - p - alpha * p) / p;
        let f = truncated_extremal(kappa, 20.0, 1e-5);
        // radii inside the plateau, where c_f(R) = 1
        let grid = log_grid((-10f64).exp(), 10f64.exp(), 16);
        let rep = stability_check(&f, alpha, p, &grid, &setting(q)).map_err(|e| e.to_string())?;
        let share = rep.constant * rep.rhs / rep.lhs;
        ensure(rep.verdict == Verdict::Holds && share < 1e-6, || {
            format!("(p {p}, Q {q}): distance term {} vs J = {}", rep.constant * rep.rhs, rep.lhs)
        })?;
        worst = worst.max(share);
    }
    Ok(format!("{count} corpus checks hold; truncated extremal distance term / J <= {worst:.1e}"))
}

// 9: critical functional of g o s equals the scaled subcritical one
fn crit_subcrit() -> Outcome {
    let windows = [(0.1, 0.5), (0.2, 0.9), (0.05, 0.3), (0.4, 0.95), (0.3, 0.6)];
    let mut worst = 0f64;
    for (q, m, big_r) in [(3.0, 2.0, 1.0), (5.0, 3.0, 2.0)] {
        let ctx = CritSubcritContext::new(q, m, big_r, 1.0, 1.0).map_err(|e| e.to_string())?;
        for (lo, hi) in windows {
            let g = RadialProfile::bump(lo * big_r, hi * big_r).unwrap();
            let rep = crit_subcrit_identity_check(&g, &ctx, 1e-8).map_err(|e| e.to_string())?;
            ensure(rep.relative_gap < 1e-8, || format!("(Q {q}, m {m}, R {big_r}) bump {lo}..{hi}: {rep:?}"))?;
            worst = worst.max(rep.relative_gap);
        }
    }
    Ok(format!("10 identities, largest relative gap {worst:.1e}"))
}

// 10: both uncertainty principles on the corpus
fn uncertainty() -> Outcome {
    let corpus = profiles();
    let s = setting(5.0);
    let mut count = 0;
    for (p, q) in [(4.0, 4.0), (3.0, 6.0)] {
        for variant in [UncertaintyVariant::A { q }, UncertaintyVariant::B { p_prime: p / (p - 1.0) }] {
            for big_r in [1.0, 3.0] {
                for (name, f) in &corpus {
                    let rep = uncertainty_check(variant, p, 2.0, big_r, f, &s).map_err(|e| format!("{name}: {e}"))?;
                    ensure(rep.verdict == Verdict::Holds, || format!("{variant:?}, p {p}, R {big_r} on {name}: {rep:?}"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} checks hold"))
}

fn bodies(r: &RunReport) -> Vec<String> {
    r.items
        .iter()
        .map(|i| {
            let mut v = serde_json::to_value(i).unwrap();
            v.as_object_mut().unwrap().remove("wall_time_s");
            v.to_string()
        })
        .collect()
}

// 11: the acceptance config is deterministic, isolates failures and runs in time
fn batch() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/acceptance.toml");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let config = parse_config(&text).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let first = run(&config, &text, Selection::All);
    let elapsed = start.elapsed();
    ensure(first.exit_code() == 0, || {
        let bad: Vec<_> = first.items.iter().filter(|i| i.status != ItemStatus::Holds).map(|i| i.name.clone()).collect();
        format!("not all items hold: {bad:?}")
    })?;
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?
        .install(|| run(&config, &text, Selection::All));
    ensure(bodies(&first) == bodies(&serial), || "parallel and serial runs differ".into())?;

    let faulty_text = format!(
        "{text}\n[[instances]]\nname = \"faulty\"\nfamily = \"EulerHardy\"\nsetting = \"q4\"\nparams = {{ p = 2.0, alpha = 2.0 }}\nprofiles = [\"bump_small\"]\n"
    );
    let faulty_config = parse_config(&faulty_text).map_err(|e| e.to_string())?;
    let mut faulty = run(&faulty_config, &faulty_text, Selection::All);
    let failed = faulty.items.iter().filter(|i| i.name.starts_with("faulty")).count();
    ensure(failed == 2, || format!("expected 2 faulty records, got {failed}"))?;
    faulty.items.retain(|i| !i.name.starts_with("faulty"));
    ensure(bodies(&faulty) == bodies(&first), || "a failing item changed other records".into())?;
    within(elapsed, 60.0)?;
    Ok(format!("{} items in {:.2} s, identical across runs and with a failing item added", first.items.len(), elapsed.as_secs_f64()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("frs constant", frs),
        ("inequality corpus", corpus_sweep),
        ("CKN scaling invariance", ckn_scaling),
        ("Hölder equality cases", holder),
        ("critical log-Hardy sharpness", log_hardy_sharpness),
        ("superweight sharpness", superweight_sharpness),
        ("remainder estimates", remainder),
        ("stability estimate", stability),
        ("critical/subcritical identity", crit_subcrit),
        ("uncertainty principles", uncertainty),
        ("determinism and batch isolation", batch),
    ];
    let mut failures = 0;
    for (n, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {title} [{secs:.2} s]: {detail}", n + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {title} [{secs:.2} s]: {detail}", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
