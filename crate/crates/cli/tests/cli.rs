use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_borcherds"));
    c.args(args).env_remove("BORCHERDS_CACHE_DIR").env_remove("BORCHERDS_LATTICE");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn info_reports_invariants() {
    let o = run(&["info", path(&data("fixture_12_2.json"))]);
    assert!(o.status.success());
    let v = stdout(&o);
    assert_eq!(v["signature"], serde_json::json!([12, 2]));
    assert_eq!(v["det"], "16");
    assert_eq!(v["invariants"], serde_json::json!([2, 2, 2, 2]));
}

#[test]
fn eis_e8_theta() {
    let o = run(&["eis", path(&data("e8.json")), "--max-exp", "3"]);
    assert!(o.status.success());
    let v = stdout(&o);
    let c = v["coeffs"].as_array().unwrap().iter().find(|c| c["exp"] == "1/1").unwrap();
    assert_eq!(c["c"], "240/1");
    let o = run(&["eis", path(&data("d4.json")), "--m", "1", "--interval"]);
    assert_eq!(stdout(&o)["coefficient"], "24/1");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["info", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["info"]).status.code(), Some(2));
    let o = run_env(&["info", path(&data("e8.json"))], &[("BORCHERDS_NAIVE_CAP", "0")]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"naive_cap": 10, "colour": "blue"}"#).unwrap();
    assert_eq!(run(&["--config", path(&cfg), "info", path(&data("e8.json"))]).status.code(), Some(2));
}

#[test]
fn config_supplies_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, format!(r#"{{"lattice": "{}", "prec_bits": 128}}"#, path(&data("d4.json")))).unwrap();
    let o = run(&["--config", path(&cfg), "info"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o)["rank"], 4);
    let o = run_env(&["info"], &[("BORCHERDS_LATTICE", path(&data("e8.json")))]);
    assert_eq!(stdout(&o)["rank"], 8);
}

#[test]
fn cache_hits_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cd = dir.path().join("cache");
    let d4 = data("d4.json");
    let args = ["--cache-dir", path(&cd), "eis", path(&d4), "--max-exp", "2"];
    let first = run(&args);
    let second = run(&args);
    let plain = run(&["eis", path(&data("d4.json")), "--max-exp", "2"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, plain.stdout);
    let entry = std::fs::read_dir(&cd).unwrap().next().unwrap().unwrap().path();
    let text = std::fs::read_to_string(&entry).unwrap();
    std::fs::write(&entry, text.replace("24/1", "25/1")).unwrap();
    let third = run(&args);
    assert_eq!(third.stdout, first.stdout);
    assert!(String::from_utf8_lossy(&third.stderr).contains("warning"));
}

#[test]
fn borcherds_pipeline() {
    let lat = data("fixture_12_2.json");
    let o = run(&["prescribe", path(&lat), "--member", "1", "--member", "2", "--member", "3"]);
    assert!(o.status.success());
    let v = stdout(&o);
    assert_eq!(v["principal_part"].as_array().unwrap().len(), 1);
    assert_eq!(v["const_term"], "8196/61");

    let dir = tempfile::tempdir().unwrap();
    let pp = dir.path().join("pp.json");
    std::fs::write(
        &pp,
        r#"{"sign": "-", "principal_part": [{"m": "1", "mu": [0,0,0,0], "c": "-3"}], "const_term": "0"}"#,
    )
    .unwrap();
    let o = run(&["decompose", path(&lat), "--pp", path(&pp)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o)["c"], "61");
    assert_eq!(run(&["decompose", path(&lat), "--pp", path(&pp), "--strict-paper"]).status.code(), Some(2));

    let fixture = dir.path().join("cusp.json");
    std::fs::write(
        &fixture,
        r#"{"weight": "7", "provenance": "test", "elements": [{"cusp": true, "series":
           {"den": 4, "trunc": "3", "sign": "+", "coeffs": [{"exp": "1", "mu": [0,0,0,0], "c": "1"}]}}]}"#,
    )
    .unwrap();
    let o = run(&["obstruct", path(&lat), "--pp", path(&pp), "--fixture", path(&fixture)]);
    let v = stdout(&o);
    assert_eq!(v["ok"], false);
    assert_eq!(v["violations"][0]["value"], "-3/1");
    let o = run(&["prescribe", path(&lat), "--member", "1", "--fixture", path(&fixture)]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["prescribe", path(&lat), "--member", "3", "--fixture", path(&fixture), "--required-trunc"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["vanish-on", path(&lat), "--m", "2"]);
    assert!(o.status.success());
    let o = run(&["h-series", path(&lat), "--trunc", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o)["sign"], "-");
}

#[test]
fn weil_relations_and_invariants() {
    let o = run(&["weil", path(&data("a2.json")), "--invariants"]);
    assert!(o.status.success());
    let v = stdout(&o);
    assert_eq!(v["relations_ok"], true);
    assert_eq!(v["invariants"], serde_json::json!([]));
}

#[test]
fn battery_is_deterministic() {
    let a = run(&["battery"]);
    let b = run(&["battery"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a)["all_passed"], true);
}
