use std::fs;
use std::path::Path;

use serde_json::{Number, Value};

use super::config::OutputFormat;
use super::run::{ItemRecord, ItemResult, RunReport};
use super::BatchError;

/// Non-integral numbers are rewritten with 17 significant digits; NaN and infinities become
/// null.
fn seventeen_digits(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = if x.is_finite() {
                Value::Number(format!("{x:.16e}").parse::<Number>().expect("valid JSON number"))
            } else {
                Value::Null
            };
        }
        Value::Array(items) => items.iter_mut().for_each(seventeen_digits),
        Value::Object(map) => map.values_mut().for_each(seventeen_digits),
        _ => {}
    }
}

pub fn render_json(report: &RunReport) -> Result<String, BatchError> {
    let mut v = serde_json::to_value(report).map_err(|e| BatchError::Encode(e.to_string()))?;
    seventeen_digits(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| BatchError::Encode(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

const CSV_COLUMNS: [&str; 19] = [
    "index",
    "kind",
    "name",
    "status",
    "family",
    "lhs",
    "rhs",
    "constant",
    "ratio",
    "margin",
    "budget",
    "lhs_error",
    "rhs_error",
    "extrapolated_limit",
    "target",
    "relative_gap",
    "fit_residual",
    "error",
    "wall_time_s",
];

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

fn row(index: usize, item: &ItemRecord) -> Vec<String> {
    let mut cells = vec![String::new(); CSV_COLUMNS.len()];
    cells[0] = index.to_string();
    cells[1] = item.kind.to_string();
    cells[2] = item.name.clone();
    cells[3] = serde_json::to_value(item.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    match &item.result {
        Some(ItemResult::Verification(r)) => {
            cells[4] = r.family.to_string();
            for (i, x) in [r.lhs, r.rhs, r.constant, r.ratio, r.margin, r.budget, r.lhs_error, r.rhs_error].into_iter().enumerate() {
                cells[5 + i] = num(x);
            }
        }
        Some(ItemResult::Probe(p)) => {
            cells[13] = num(p.extrapolated_limit);
            cells[14] = num(p.target);
            cells[15] = num(p.relative_gap);
            cells[16] = num(p.fit_residual);
        }
        Some(ItemResult::Identity(e)) => {
            cells[5] = num(e.lhs);
            cells[6] = num(e.rhs);
            cells[11] = num(e.lhs_error);
            cells[12] = num(e.rhs_error);
            cells[15] = num(e.relative_gap);
        }
        Some(ItemResult::Admissibility(_)) | None => {}
    }
    cells[17] = item.error.clone().unwrap_or_default();
    cells[18] = num(item.wall_time_s);
    cells
}

/// One row per item over a fixed column set; cells that do not apply to an item kind are empty.
pub fn render_csv(report: &RunReport) -> Result<String, BatchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let enc = |e: csv::Error| BatchError::Encode(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(enc)?;
    for (i, item) in report.items.iter().enumerate() {
        w.write_record(row(i, item)).map_err(enc)?;
    }
    let bytes = w.into_inner().map_err(|e| BatchError::Encode(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| BatchError::Encode(e.to_string()))
}

/// Write the report to `path`, creating parent directories.
pub fn emit(report: &RunReport, format: OutputFormat, path: &Path) -> Result<(), BatchError> {
    let text = match format {
        OutputFormat::Json => render_json(report)?,
        OutputFormat::Csv => render_csv(report)?,
    };
    let io = |source| BatchError::Io { path: path.to_path_buf(), source };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}
