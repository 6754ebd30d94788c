use hardylab::batch::{emit, parse_config, render_csv, render_json, run, ItemStatus, OutputFormat, RunReport, Selection};

const CONFIG: &str = r#"
[tolerance]
rel = 1e-10

[[settings]]
name = "s4"
Q = 4.0

[[settings]]
name = "s6"
Q = 6.0
sigma = 2.5

[[profiles]]
name = "f1"
text = "(profile (support 1 2) (breaks) (bump 1 2))"

[[profiles]]
name = "f2"
text = "(profile (support 0.25 0.5) (breaks) (bump 0.25 0.5))"

[[instances]]
name = "eh"
family = "EulerHardy"
setting = "s4"
params = { p = 2.0, alpha = 0.0 }
profiles = ["f1", "f2"]

[[instances]]
name = "sw"
family = "Superweight"
setting = "s6"
params = { p = 2.0, a = 1.0, b = 1.0, alpha = 1.0, beta = 1.0, m = 0.5 }
profiles = ["f2"]

[[identities]]
name = "cs"
profile = "f2"
Q = 3.0
m = 2.0
R = 1.0
"#;

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

#[test]
fn three_verifications_in_config_order() {
    let c = parse_config(CONFIG).unwrap();
    let r = run(&c, CONFIG, Selection::Verify);
    let names: Vec<_> = r.items.iter().map(|i| i.name.as_str()).collect();
    assert_eq!(names, ["eh/f1", "eh/f2", "sw/f2", "cs"]);
    assert!(r.items.iter().all(|i| i.status == ItemStatus::Holds), "{r:?}");
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn deterministic_across_runs_and_thread_counts() {
    let c = parse_config(CONFIG).unwrap();
    let a = run(&c, CONFIG, Selection::All);
    let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run(&c, CONFIG, Selection::All));
    assert_eq!(bodies(&a), bodies(&b));
    assert_eq!(a.meta.config_sha256, b.meta.config_sha256);
}

#[test]
fn failing_item_is_isolated() {
    let faulty = CONFIG.replace(
        "[[identities]]",
        "[[instances]]\nname = \"bad\"\nfamily = \"EulerHardy\"\nsetting = \"s4\"\nparams = { p = 2.0, alpha = 2.0 }\nprofiles = [\"f1\"]\n\n[[identities]]",
    );
    let clean = run(&parse_config(CONFIG).unwrap(), CONFIG, Selection::All);
    let dirty = run(&parse_config(&faulty).unwrap(), &faulty, Selection::All);
    let bad: Vec<_> = dirty.items.iter().filter(|i| i.name.starts_with("bad")).collect();
    assert_eq!(bad.len(), 2);
    assert_eq!(bad[0].status, ItemStatus::Violated);
    assert_eq!(bad[1].status, ItemStatus::Error);
    assert!(bad[1].error.as_deref().unwrap().contains("alpha p != Q"));
    let mut kept = dirty.clone();
    kept.items.retain(|i| !i.name.starts_with("bad"));
    assert_eq!(bodies(&kept), bodies(&clean));
    assert_eq!(dirty.exit_code(), 3);
}

#[test]
fn json_schema_fields() {
    let c = parse_config(CONFIG).unwrap();
    let empty = run(&parse_config("").unwrap(), "", Selection::All);
    let v: serde_json::Value = serde_json::from_str(&render_json(&empty).unwrap()).unwrap();
    assert_eq!(v["items"], serde_json::json!([]));
    assert!(v["meta"]["config_sha256"].as_str().unwrap().len() == 64);

    let r = run(&c, CONFIG, Selection::Verify);
    let v: serde_json::Value = serde_json::from_str(&render_json(&r).unwrap()).unwrap();
    let item = &v["items"][0]["result"];
    for key in ["lhs", "rhs", "constant", "ratio", "margin", "verdict"] {
        assert!(!item[key].is_null(), "{key}");
    }
    assert_eq!(item["verdict"], "holds");
}

#[test]
fn seventeen_significant_digits() {
    let c = parse_config(CONFIG).unwrap();
    let r = run(&c, CONFIG, Selection::Verify);
    let text = render_json(&r).unwrap();
    let line = text.lines().find(|l| l.trim_start().starts_with("\"lhs\"")).unwrap();
    let number = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = number.split(['e', 'E']).next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{number}");
    let parsed: f64 = number.parse().unwrap();
    assert_eq!(parsed, match &r.items[0].result {
        Some(hardylab::batch::ItemResult::Verification(v)) => v.lhs,
        _ => unreachable!(),
    });
}

#[test]
fn csv_rows_have_constant_width() {
    let c = parse_config(CONFIG).unwrap();
    let r = run(&c, CONFIG, Selection::All);
    let text = render_csv(&r).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let width = reader.headers().unwrap().len();
    let rows: Vec<_> = reader.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), r.items.len());
    assert!(rows.iter().all(|row| row.len() == width));
}

#[test]
fn emit_writes_and_reports_io_errors() {
    let c = parse_config(CONFIG).unwrap();
    let r = run(&c, CONFIG, Selection::Validate);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/out.json");
    emit(&r, OutputFormat::Json, &path).unwrap();
    assert!(std::fs::read_to_string(&path).unwrap().contains("\"admissibility\""));
    let blocked = dir.path().join("nested/out.json/x.csv");
    let err = emit(&r, OutputFormat::Csv, &blocked).unwrap_err();
    assert!(err.to_string().contains("out.json"), "{err}");
}
