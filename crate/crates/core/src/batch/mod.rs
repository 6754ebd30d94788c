//! Declarative batch driver: a TOML run configuration is resolved, its items are executed in
//! parallel and merged in configuration order, and the report is written as JSON or CSV.

mod config;
mod emit;
mod run;

pub use config::{
    parse_config, IdentitySpec, InstanceSpec, OutputFormat, OutputSpec, ProbeSpec, ProfileSpec, RunConfig,
    SettingSpec, ToleranceSpec,
};
pub use emit::{emit, render_csv, render_json};
pub use run::{run, ItemRecord, ItemResult, ItemStatus, Meta, RunReport, Selection};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("config syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("duplicate {kind} name \"{name}\"")]
    Duplicate { kind: &'static str, name: String },
    #[error("{kind} \"{name}\" referenced by \"{by}\" is not defined")]
    Unresolved { kind: &'static str, name: String, by: String },
    #[error("invalid {kind} \"{name}\": {message}")]
    Invalid { kind: &'static str, name: String, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot encode report: {0}")]
    Encode(String),
}
