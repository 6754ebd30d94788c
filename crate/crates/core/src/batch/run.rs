use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{IdentitySpec, ProbeSpec, RunConfig};
use crate::catalog::{evaluate_sides_with, validate, AdmissibilityVerdict, Family, InequalityInstance, Verdict, VerificationReport};
use crate::quadrature::Tolerance;
use crate::sharpness::{natural_family, probe_with, ProbeResult, SharpnessError};
use crate::transforms::{crit_subcrit_identity_check_with, CritSubcritContext, EqualityReport};

/// Which item kinds a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Validate,
    Verify,
    Probe,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Holds,
    Inconclusive,
    Error,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ItemResult {
    Admissibility(AdmissibilityVerdict),
    Verification(VerificationReport),
    Probe(ProbeResult),
    Identity(EqualityReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemRecord {
    pub kind: &'static str,
    pub name: String,
    pub status: ItemStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<ItemResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceMeta {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub tolerance: ToleranceMeta,
    pub item_count: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub meta: Meta,
    pub items: Vec<ItemRecord>,
}

impl RunReport {
    /// 0 when everything holds, 3 when anything is violated, 2 when anything is inconclusive
    /// or failed.
    pub fn exit_code(&self) -> i32 {
        match self.items.iter().map(|i| i.status).max() {
            None | Some(ItemStatus::Holds) => 0,
            Some(ItemStatus::Violated) => 3,
            Some(_) => 2,
        }
    }
}

enum Work<'a> {
    Validate(&'a str),
    Verify(&'a str, &'a str),
    Probe(&'a ProbeSpec),
    Identity(&'a IdentitySpec),
}

fn plan(config: &RunConfig, selection: Selection) -> Vec<Work<'_>> {
    let mut out = Vec::new();
    let want = |s: Selection| selection == s || selection == Selection::All;
    for inst in &config.instances {
        if want(Selection::Validate) {
            out.push(Work::Validate(&inst.name));
        }
        if want(Selection::Verify) {
            out.extend(inst.profiles.iter().map(|p| Work::Verify(&inst.name, p)));
        }
    }
    if want(Selection::Probe) {
        out.extend(config.probes.iter().map(Work::Probe));
    }
    if want(Selection::Verify) {
        out.extend(config.identities.iter().map(Work::Identity));
    }
    out
}

fn instance(config: &RunConfig, name: &str) -> Result<InequalityInstance, String> {
    let spec = config.instance(name);
    let family = Family::from_str(&spec.family).map_err(|e| e.to_string())?;
    InequalityInstance::new(family, spec.params.clone(), config.setting(&spec.setting)).map_err(|e| e.to_string())
}

fn verdict_status(v: Verdict) -> ItemStatus {
    match v {
        Verdict::Holds => ItemStatus::Holds,
        Verdict::Violated => ItemStatus::Violated,
        Verdict::Inconclusive => ItemStatus::Inconclusive,
    }
}

fn execute(config: &RunConfig, work: &Work<'_>, tol: &Tolerance) -> (String, &'static str, Result<(ItemStatus, ItemResult), String>) {
    match work {
        Work::Validate(name) => {
            let spec = config.instance(name);
            let out = Family::from_str(&spec.family).map_err(|e| e.to_string()).map(|family| {
                let v = validate(family, &spec.params, &config.setting(&spec.setting));
                let status = if v.admissible { ItemStatus::Holds } else { ItemStatus::Violated };
                (status, ItemResult::Admissibility(v))
            });
            (name.to_string(), "admissibility", out)
        }
        Work::Verify(name, profile) => {
            let out = instance(config, name).and_then(|inst| {
                let f = config.profile(profile);
                let rep = evaluate_sides_with(&inst, &f, tol).map_err(|e| e.to_string())?;
                Ok((verdict_status(rep.verdict), ItemResult::Verification(rep)))
            });
            (format!("{name}/{profile}"), "verification", out)
        }
        Work::Probe(spec) => {
            let out = instance(config, &spec.instance).and_then(|inst| {
                let family = natural_family(&inst).map_err(|e| e.to_string())?;
                if spec.family_kind != "natural" && spec.family_kind != family.kind_name() {
                    return Err(SharpnessError::UnsupportedProbe {
                        family: inst.family().name().to_string(),
                        kind: spec.family_kind.clone(),
                    }
                    .to_string());
                }
                let res = probe_with(&inst, &family, &spec.indices, tol).map_err(|e| e.to_string())?;
                let ok = res.sound && res.relative_gap <= spec.max_gap;
                let status = if ok { ItemStatus::Holds } else { ItemStatus::Violated };
                Ok((status, ItemResult::Probe(res)))
            });
            (spec.name.clone(), "probe", out)
        }
        Work::Identity(spec) => {
            let out = CritSubcritContext::new(spec.q, spec.m, spec.big_r, spec.sigma_q, spec.sigma_m)
                .and_then(|ctx| crit_subcrit_identity_check_with(&config.profile(&spec.profile), &ctx, spec.max_gap, tol))
                .map(|rep| (verdict_status(rep.verdict), ItemResult::Identity(rep)))
                .map_err(|e| e.to_string());
            (spec.name.clone(), "identity", out)
        }
    }
}

/// Execute the selected items concurrently and merge them in configuration order. A failing
/// item becomes an error record; the others are unaffected.
pub fn run(config: &RunConfig, config_text: &str, selection: Selection) -> RunReport {
    let start = Instant::now();
    let tol = config.tolerance();
    let work = plan(config, selection);
    let items: Vec<ItemRecord> = work
        .par_iter()
        .map(|w| {
            let t = Instant::now();
            let (name, kind, out) = execute(config, w, &tol);
            let wall_time_s = t.elapsed().as_secs_f64();
            match out {
                Ok((status, result)) => ItemRecord { kind, name, status, result: Some(result), error: None, wall_time_s },
                Err(e) => ItemRecord { kind, name, status: ItemStatus::Error, result: None, error: Some(e), wall_time_s },
            }
        })
        .collect();
    let hash = Sha256::digest(config_text.as_bytes());
    RunReport {
        meta: Meta {
            tool: "hardylab",
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
            tolerance: ToleranceMeta { abs: tol.abs, rel: tol.rel, max_panels: tol.max_panels },
            item_count: items.len(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        items,
    }
}
