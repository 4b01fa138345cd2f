use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rainham"))
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_reports_r_and_exceptional() {
    let v = json(&["analyze", "--gen", r#"{"kind":"extremal-construction","n":6}"#]);
    assert_eq!(v["r"]["value"], 3);
    assert_eq!(v["exceptional"], true);
}

#[test]
fn count_and_solve() {
    let v = json(&["count", "--gen", r#"{"kind":"all-clique","n":5}"#]);
    assert_eq!(v["count"], "1440");
    let v = json(&["solve", "--gen", r#"{"kind":"all-clique","n":6}"#]);
    assert_eq!(v["outcome"], "found");
}

#[test]
fn sample_and_robust_ham() {
    let v = json(&["sample", "--gen", r#"{"kind":"random-two-cliques","n":40,"noise":6}"#, "--seed", "2"]);
    assert_eq!(v["route"], "cliques");
    let v = json(&["robust-ham", "--gen", r#"{"kind":"all-clique","n":9}"#, "--forced", "0-4,2-7"]);
    assert_eq!(v["cycle"].as_array().unwrap().len(), 9);
}

#[test]
fn campaign_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"kind":"threshold-shared","family":{"kind":"all-clique","n":7},"p_grid":[0.5,1.0],"trials":4}"#).unwrap();
    let out = dir.path().join("run");
    let (c, o) = (cfg.to_str().unwrap(), out.to_str().unwrap());
    json(&["threshold", "--config", c, "--out", o]);
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    let res = out.join("results.jsonl");
    let v = json(&["replay", "--config", c, "--results", res.to_str().unwrap()]);
    assert_eq!(v["verdict"], "identical");
    let st = bin().args(["replay", "--config", c, "--results", res.to_str().unwrap(), "--seed", "9"]).output().unwrap();
    assert!(!st.status.success());
    assert!(String::from_utf8_lossy(&st.stdout).contains("different-campaign"));
}

#[test]
fn missing_family_is_an_error() {
    let st = bin().args(["solve"]).output().unwrap();
    assert!(!st.status.success());
    assert!(String::from_utf8_lossy(&st.stderr).contains("--family"));
}
