use std::collections::HashSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BatchError;
use crate::catalog::{Family, Params};
use crate::model::{HomogeneousSetting, RadialProfile};
use crate::quadrature::Tolerance;
use crate::transforms::CritSubcritContext;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingSpec {
    pub name: String,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(default = "one")]
    pub sigma: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub name: String,
    /// Profile in the canonical text grammar.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub name: String,
    pub family: String,
    pub setting: String,
    #[serde(default)]
    pub params: Params,
    /// Profiles to verify the instance on, one item each.
    #[serde(default)]
    pub profiles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub name: String,
    pub instance: String,
    /// `natural`, or the kind name of the instance's natural family.
    #[serde(default = "natural")]
    pub family_kind: String,
    pub indices: Vec<f64>,
    /// Largest accepted relative gap between the extrapolated limit and the target.
    #[serde(default = "default_probe_gap")]
    pub max_gap: f64,
}

fn natural() -> String {
    "natural".into()
}

fn default_probe_gap() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    pub name: String,
    pub profile: String,
    #[serde(rename = "Q")]
    pub q: f64,
    pub m: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "sigma_Q", default = "one")]
    pub sigma_q: f64,
    #[serde(default = "one")]
    pub sigma_m: f64,
    #[serde(default = "default_identity_gap")]
    pub max_gap: f64,
}

fn default_identity_gap() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub abs: Option<f64>,
    pub rel: Option<f64>,
    pub max_panels: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other}, expected json or csv")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub settings: Vec<SettingSpec>,
    #[serde(default)]
    pub profiles: Vec<ProfileSpec>,
    #[serde(default)]
    pub instances: Vec<InstanceSpec>,
    #[serde(default)]
    pub probes: Vec<ProbeSpec>,
    #[serde(default)]
    pub identities: Vec<IdentitySpec>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn unique<'a>(kind: &'static str, names: impl Iterator<Item = &'a String>) -> Result<HashSet<&'a str>, BatchError> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(BatchError::Duplicate { kind, name: n.clone() });
        }
    }
    Ok(seen)
}

fn resolve(kind: &'static str, known: &HashSet<&str>, name: &str, by: &str) -> Result<(), BatchError> {
    if known.contains(name) {
        Ok(())
    } else {
        Err(BatchError::Unresolved { kind, name: name.to_string(), by: by.to_string() })
    }
}

fn invalid(kind: &'static str, name: &str, message: impl ToString) -> BatchError {
    BatchError::Invalid { kind, name: name.to_string(), message: message.to_string() }
}

impl RunConfig {
    /// Canonical TOML text; parsing it gives back an equal configuration.
    pub fn to_text(&self) -> Result<String, BatchError> {
        toml::to_string(self).map_err(|e| BatchError::Encode(e.to_string()))
    }

    /// Quadrature tolerance: the config's overrides on top of the environment default.
    pub fn tolerance(&self) -> Tolerance {
        let base = Tolerance::from_env();
        match self.tolerance {
            Some(t) => Tolerance {
                abs: t.abs.unwrap_or(base.abs),
                rel: t.rel.unwrap_or(base.rel),
                max_panels: t.max_panels.unwrap_or(base.max_panels),
            },
            None => base,
        }
    }

    pub(crate) fn setting(&self, name: &str) -> HomogeneousSetting {
        let s = self.settings.iter().find(|s| s.name == name).expect("resolved setting");
        HomogeneousSetting::with_sigma(s.q, s.sigma).expect("validated setting")
    }

    pub(crate) fn profile(&self, name: &str) -> RadialProfile {
        let p = self.profiles.iter().find(|p| p.name == name).expect("resolved profile");
        RadialProfile::parse(&p.text).expect("validated profile")
    }

    pub(crate) fn instance(&self, name: &str) -> &InstanceSpec {
        self.instances.iter().find(|i| i.name == name).expect("resolved instance")
    }

    /// Names unique per kind, references resolved, settings/profiles/families well formed.
    fn check(&self) -> Result<(), BatchError> {
        let settings = unique("setting", self.settings.iter().map(|s| &s.name))?;
        let profiles = unique("profile", self.profiles.iter().map(|p| &p.name))?;
        let instances = unique("instance", self.instances.iter().map(|i| &i.name))?;
        unique("probe", self.probes.iter().map(|p| &p.name))?;
        unique("identity", self.identities.iter().map(|i| &i.name))?;
        if let Some(t) = self.tolerance {
            let bad = |v: Option<f64>| v.is_some_and(|x| !(x > 0.0 && x.is_finite()));
            if bad(t.abs) || bad(t.rel) || t.max_panels == Some(0) {
                return Err(invalid("tolerance", "tolerance", "values must be positive and finite"));
            }
        }
        for s in &self.settings {
            HomogeneousSetting::with_sigma(s.q, s.sigma).map_err(|e| invalid("setting", &s.name, e))?;
        }
        for p in &self.profiles {
            RadialProfile::parse(&p.text).map_err(|e| invalid("profile", &p.name, e))?;
        }
        for i in &self.instances {
            Family::from_str(&i.family).map_err(|e| invalid("instance", &i.name, e))?;
            resolve("setting", &settings, &i.setting, &i.name)?;
            for p in &i.profiles {
                resolve("profile", &profiles, p, &i.name)?;
            }
        }
        for p in &self.probes {
            resolve("instance", &instances, &p.instance, &p.name)?;
            if p.indices.iter().any(|x| !x.is_finite()) {
                return Err(invalid("probe", &p.name, "indices must be finite"));
            }
        }
        for i in &self.identities {
            resolve("profile", &profiles, &i.profile, &i.name)?;
            CritSubcritContext::new(i.q, i.m, i.big_r, i.sigma_q, i.sigma_m).map_err(|e| invalid("identity", &i.name, e))?;
        }
        Ok(())
    }
}

/// Parse and fully resolve a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, BatchError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        BatchError::Syntax { line, col, message: e.message().to_string() }
    })?;
    config.check()?;
    Ok(config)
}
