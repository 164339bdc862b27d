use std::path::Path;
use std::process::{Command, Output};

fn kmilnor(args: &[&str], cache: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kmilnor"));
    c.args(args);
    match cache {
        Some(d) => c.env("KMILNOR_CACHE_DIR", d),
        None => c.arg("--no-cache"),
    };
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bn_json_report() {
    let o = kmilnor(&["bn", "--field", "q", "--support", "-1,2,3", "--n", "3", "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["invariant_factors_H2"]["description"], "Z/3 + Z/6 + Z^2");
    assert_eq!(j["invariant_factors_H1"]["description"], "0");
    assert!(j["timings_ms"].is_null());
    assert_eq!(j["spec"]["truncated"], true);
}

#[test]
fn n2_is_refused_with_exit_2() {
    let o = kmilnor(&["bn", "--field", "q", "--support", "-1,2", "--n", "2"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("K_3^ind"));
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(kmilnor(&["factor", "2/0"], None).status.code(), Some(2));
    assert_eq!(kmilnor(&["factor", "0"], None).status.code(), Some(2));
    assert_eq!(kmilnor(&["bn", "--support", "-1,2", "--n", "9"], None).status.code(), Some(2));
    assert_eq!(kmilnor(&["--field", "p=4", "factor", "t"], None).status.code(), Some(2));
    assert_eq!(kmilnor(&["bn", "--bogus"], None).status.code(), Some(2));
}

#[test]
fn steinberg_suite_passes() {
    let o = kmilnor(&["verify", "--suite", "steinberg", "--count", "300", "--seed", "7", "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["failed"], 0);
    assert_eq!(j["seed"], 7);
}

#[test]
fn every_suite_runs() {
    for suite in ["product-formula", "dd-zero", "bar-cycles", "exterior"] {
        let o = kmilnor(&["verify", "--suite", suite, "--count", "20"], None);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = kmilnor(&["--field", "p=3", "verify", "--suite", "steinberg", "--count", "50"], None);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn same_config_gives_identical_bytes() {
    let args = ["scan", "--field", "q", "--n", "3", "--support", "-1,2", "--support", "-1,2,3", "--json"];
    let a = kmilnor(&args, None);
    let b = kmilnor(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = ["verify", "--suite", "exterior", "--count", "30", "--seed", "11", "--json"];
    assert_eq!(kmilnor(&v, None).stdout, kmilnor(&v, None).stdout);
}

#[test]
fn cache_cold_and_warm_agree() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bn", "--field", "p=3", "--support", "t,t+1", "--n", "4", "--json"];
    let cold = kmilnor(&args, Some(dir.path()));
    let files = std::fs::read_dir(dir.path()).unwrap().count();
    assert!(files > 0);
    let warm = kmilnor(&args, Some(dir.path()));
    let uncached = kmilnor(&args, None);
    assert_eq!(cold.status.code(), Some(0));
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, uncached.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), files);
}

#[test]
fn kappa_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("x.json");
    std::fs::write(&input, r#"{"terms": [{"coefficient": 2, "a": "2", "b": "-3", "c": ["5", "7/2"]}]}"#).unwrap();
    let o = kmilnor(&["kappa", "--n", "4", "--input", input.to_str().unwrap(), "--json"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["certificates"]["is_cycle"], true);
    assert_eq!(j["certificates"]["block_form"], true);
    assert!(j["reported_not_asserted"].is_object());
    let o = kmilnor(&["kappa", "--n", "3", "--input", input.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn chiprime_kernel_basis_and_rejection() {
    let o = kmilnor(&["chiprime", "--n", "3", "--support", "-1,2,3", "--json"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["all_certified"], true);
    assert!(!j["elements"].as_array().unwrap().is_empty());

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("x.json");
    std::fs::write(&input, r#"[{"a": "2", "b": "3", "c": ["3"]}]"#).unwrap();
    let o = kmilnor(&["chiprime", "--n", "3", "--support", "-1,2,3", "--input", input.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn golden_record_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("golden.json");
    let f = file.to_str().unwrap();
    let o = kmilnor(&["golden", "record", "--file", f, "--case", "q:-1,2:3", "--case", "p=3:t,t+1:5"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = kmilnor(&["golden", "check", "--file", f, "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(j["entries"].as_array().unwrap().iter().all(|e| e["status"] == "match"));

    let mut store: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    store["entries"][0]["value"]["position_dims"] = serde_json::json!([0]);
    store["entries"][1]["convention"] = serde_json::json!(0);
    std::fs::write(&file, serde_json::to_string(&store).unwrap()).unwrap();
    let o = kmilnor(&["golden", "check", "--file", f, "--json"], None);
    assert_eq!(o.status.code(), Some(1));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["entries"][0]["status"], "mismatch");
    assert_eq!(j["entries"][1]["status"], "invalidated");
}
