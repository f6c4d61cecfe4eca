mod common;

use std::process::Command;

use common::{code, json, run, stdout};

fn energies(v: &serde_json::Value) -> Vec<f64> {
    v["spectrum"]["entries"].as_array().unwrap().iter().map(|e| e["energy"].as_f64().unwrap()).collect()
}

const PT: [&str; 8] = ["spectrum", "--id", "poschl-teller-trig", "--gamma", "2", "--delta", "3", "--count"];

#[test]
fn poschl_teller_closed_form() {
    let mut a = PT.to_vec();
    a.extend(["3", "--method", "closed-form"]);
    let (c, v) = json(&a);
    assert_eq!(c, 0);
    assert_eq!(energies(&v), vec![12.5, 24.5, 40.5]);
}

#[test]
fn poschl_teller_fd_agrees() {
    let mut a = PT.to_vec();
    a.extend(["3", "--method", "fd"]);
    let (c, v) = json(&a);
    assert_eq!(c, 0);
    for (e, r) in energies(&v).iter().zip([12.5, 24.5, 40.5]) {
        assert!((e - r).abs() / r < 1e-3, "{e} vs {r}");
    }
}

#[test]
fn representation_labels_reproduce_the_ladder() {
    let mut a = PT.to_vec();
    a.extend(["3", "--method", "rep"]);
    let (_, v) = json(&a);
    for (e, r) in energies(&v).iter().zip([12.5, 24.5, 40.5]) {
        assert!((e - r).abs() < 1e-12);
    }
}

#[test]
fn violated_bound_has_no_bound_states() {
    let a = ["spectrum", "--id", "rosen-morse-tanh", "--param", "A=2", "--param", "B=1", "--method", "rep"];
    assert_eq!(code(&run(&a)), 4);
    let (_, v) = json(&a);
    assert_eq!(v["error"], "no-bound-states");
}

#[test]
fn spectrum_csv_header() {
    let mut a = vec!["--format", "csv"];
    a.extend(PT);
    a.push("2");
    let text = stdout(&run(&a));
    assert_eq!(text.lines().next(), Some("level,quantum_numbers,energy,rel_err"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn euler_commutators_all_pass() {
    let (c, v) = json(&["verify", "commutators", "--frame", "euler", "--seed", "7"]);
    assert_eq!(c, 0);
    assert_eq!(v["passed"], 15);
    assert_eq!(v["seed"], 7);
}

#[test]
fn propagator_relation_holds() {
    let (c, v) = json(&["verify", "propagator", "--pair", "rm-to-pt"]);
    assert_eq!(c, 0);
    assert!(v["report"]["max_deviation"].as_f64().unwrap() <= 0.05);
}

#[test]
fn corrupted_prefactor_fails() {
    let (c, v) = json(&["verify", "propagator", "--corrupt-prefactor"]);
    assert_eq!(c, 5);
    assert_eq!(v["pass"], false);
}

#[test]
fn reports_are_deterministic() {
    let a = ["--format", "json", "verify", "hermiticity", "--frame", "rm", "--seed", "11"];
    assert_eq!(run(&a).stdout, run(&a).stdout);
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_specmorph"))
        .args(["--format", "json", "verify", "commutators"])
        .env("SPECMORPH_SEED", "99")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 99);
    let (_, d) = json(&["verify", "commutators"]);
    assert_eq!(d["seed"], 7);
}
