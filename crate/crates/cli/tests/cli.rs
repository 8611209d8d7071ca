use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn capcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capcalc"))
        .args(args)
        .env_remove("CAPCALC_JOBS")
        .env_remove("CAPCALC_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = capcalc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn capacity_at_seven() {
    let v = json(&["capacity", "7/1"]);
    assert_eq!(v["value"], "8/3");
    assert_eq!(v["regime"], "line");
    assert_eq!(v["search"]["agrees"], true);
}

#[test]
fn capacity_examples() {
    assert_eq!(json(&["capacity", "13/2"])["value"], "13/5");
    assert_eq!(json(&["capacity", "57/8"])["value"], "1025/384");
    let v = json(&["capacity", "8"]);
    assert_eq!(v["value"], "17/6");
    assert_eq!(v["witnesses"], serde_json::json!(["(6;3,2^7)"]));
    let v = json(&["capacity", "35/4"]);
    assert_eq!(v["value"], "sqrt(35/4)");
    assert_eq!(v["witnesses"], serde_json::json!([]));
}

#[test]
fn reduce_trace_ends_at_the_exceptional_sphere() {
    let v = json(&["reduce", "6;3,2,2,2,2,2,2,2"]);
    assert_eq!(v["verdict"], "in_e");
    let trace = v["trace"].as_array().unwrap();
    assert_eq!(trace.last().unwrap(), "(0;-1)");
}

#[test]
fn reduce_rejects_non_members() {
    let v = json(&["reduce", "5;3,3,1^8"]);
    assert_eq!(v["verdict"], "not_in_e");
    assert_eq!(capcalc(&["reduce", "3;2^2,1^5"]).status.code(), Some(2));
}

#[test]
fn verify_table_t1_passes() {
    let v = json(&["verify", "table_t1"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"][0]["status"], "pass");
}

#[test]
fn verify_all_passes() {
    let v = json(&["verify"]);
    assert_eq!(v["passed"], true, "{v}");
    assert_eq!(v["checks"].as_array().unwrap().len(), 12);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["capacity", "x/y"],
        vec!["capacity", "1/2"],
        vec!["capacity", "5", "--method", "search"],
        vec!["classes", "--at", "57/8", "--dmax", "0"],
        vec!["classes", "--interval", "9"],
        vec!["verify", "nonsense"],
        vec!["stairs", "--n", "-1"],
        vec!["frobnicate"],
    ] {
        let out = capcalc(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_reproducible() {
    let a = capcalc(&["graph", "--from", "6", "--to", "9", "--step", "1/7"]);
    let b = capcalc(&["graph", "--from", "6", "--to", "9", "--step", "1/7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn graph_csv_file() {
    let path = scratch("graph.csv");
    let v = json(&["graph", "--from", "7", "--to", "8", "--step", "1/4", "--out", path.to_str().unwrap()]);
    assert_eq!(v["samples"], 5);
    assert_eq!(v["continuous"], true);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a,c_decimal,c_exact,regime");
    assert_eq!(lines[1], "7,2.666666666667,8/3,line");
    assert_eq!(lines[5], "8,2.833333333333,17/6,obstruction:8");
}

#[test]
fn graph_breakpoints_on_six_to_seven() {
    let v = json(&["graph", "--from", "6", "--to", "7", "--step", "1/2"]);
    let bps: Vec<&str> = v["breakpoints"].as_array().unwrap().iter().map(|b| b["exact"].as_str().unwrap()).collect();
    for x in ["25/4", "13/2", "169/25", "34/5"] {
        assert!(bps.contains(&x), "{x} in {bps:?}");
    }
}

#[test]
fn stairs_table() {
    let out = capcalc(&["stairs", "--n", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,a_n,b_n,c_a_n,c_b_n,E_b_n,E_a_n");
    assert_eq!(lines[3], "2,25/4,13/2,5/2,13/5,\"(5;2^6,1^2)\",\"(10;4^6,1^5)\"");
}

#[test]
fn ech_counts() {
    let v = json(&["ech", "--slope", "57/8", "--anchor", "7", "17"]);
    assert_eq!(v["count"], 1227);
    assert_eq!(v["s"], 3);
    assert_eq!(v["one_sided"]["value"], "1025/384");
    let v = json(&["ech", "--slope", "57/8", "--anchor", "-1", "144"]);
    assert_eq!((v["count"].as_i64(), v["s"].as_i64()), (Some(74322), Some(18)));
    let v = json(&["ech", "--verify-tables"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn classes_queries() {
    let v = json(&["classes", "--interval", "4"]);
    assert_eq!(v["d_max"], 61);
    assert_eq!(v["classes"][0]["class"], "(59;22^7,5^3,4,1^3)");
    let v = json(&["classes", "--at", "57/8", "--dmax", "48"]);
    assert_eq!(v["classes"][0]["class"], "(48;18^7,3,2^7)");
    assert_eq!(v["classes"][0]["obstructive"], true);
}

#[test]
fn config_and_jobs() {
    let path = scratch("capcalc.conf");
    std::fs::write(&path, "# narrower bound\ninterval_bound.4 = 40\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_capcalc"))
        .args(["classes", "--interval", "4", "--config", path.to_str().unwrap()])
        .env("CAPCALC_JOBS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["d_max"], 40);
    assert_eq!(v["classes"], serde_json::json!([]));
    std::fs::write(&path, "bogus = 1\n").unwrap();
    let out = capcalc(&["verify", "eekfin", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
