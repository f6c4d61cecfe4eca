mod common;

use std::io::Write;

use common::{code, json, run, stdout};

#[test]
fn catalog_lists_the_pipeline_entries() {
    let o = run(&["catalog"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for id in ["rosen-morse-hyp-source", "poschl-teller-trig", "rosen-morse-tanh"] {
        assert!(text.contains(id), "{id} missing");
    }
    let (c, v) = json(&["catalog"]);
    assert_eq!(c, 0);
    assert!(v.as_array().expect("array").len() >= 5);
}

#[test]
fn catalog_csv_has_one_row_per_entry() {
    let (_, v) = json(&["catalog"]);
    let o = run(&["--format", "csv", "catalog"]);
    let rows = stdout(&o).lines().count();
    assert_eq!(rows, v.as_array().unwrap().len() + 1);
}

#[test]
fn unknown_id_is_not_found() {
    assert_eq!(code(&run(&["catalog", "--id", "nonexistent"])), 2);
    let (c, v) = json(&["catalog", "--id", "nonexistent"]);
    assert_eq!(c, 2);
    assert_eq!(v["error"], "not-found");
    assert_eq!(v["exit_code"], 2);
}

#[test]
fn builtin_plan_reaches_poschl_teller() {
    let (c, v) = json(&["transform", "--from", "rosen-morse-tanh", "--plan", "builtin:rm-to-pt"]);
    assert_eq!(c, 0);
    assert_eq!(v["target"], "poschl-teller-trig");
    assert_eq!(v["relation"]["overall_constant"], "(rat 1 2)");
    assert_eq!(v["steps"].as_array().unwrap().len(), 4);
    let flags = v["flags"].as_array().unwrap();
    let status = |name: &str| flags.iter().find(|f| f["component"] == name).map(|f| f["status"].clone());
    assert_eq!(status("prefactor"), Some("match".into()));
    assert_eq!(status("parameter:A"), Some("match".into()));
    assert_eq!(status("parameter:B"), Some("match".into()));
    assert_eq!(status("S3:constant"), Some("mismatch".into()));
}

#[test]
fn printed_source_does_not_match() {
    let (c, v) = json(&["transform", "--from", "rosen-morse-hyp-source"]);
    assert_eq!(c, 3);
    assert!(v["match_error"].is_string());
}

#[test]
fn empty_plan_is_the_identity() {
    let (c, v) = json(&["transform", "--from", "poschl-teller-trig", "--plan", "empty"]);
    assert_eq!(c, 0);
    assert_eq!(v["relation"]["overall_constant"], "1");
    assert_eq!(v["relation"]["endpoint_prefactor"], "1");
    assert!(v["steps"].as_array().unwrap().is_empty());
}

#[test]
fn vanishing_derivative_inside_the_interval_is_rejected() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../plans/rm-to-pt.json")).unwrap();
    let mut plan: serde_json::Value = serde_json::from_str(&text).unwrap();
    plan["steps"][0]["interval"][1] = "(div pi a)".into();
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(plan.to_string().as_bytes()).unwrap();
    let (c, v) = json(&["transform", "--plan", f.path().to_str().unwrap()]);
    assert_eq!(c, 3);
    assert_eq!(v["error"], "singular-transform");
}

#[test]
fn missing_plan_file_is_not_found() {
    assert_eq!(code(&run(&["transform", "--plan", "/nonexistent/plan.json"])), 2);
}
