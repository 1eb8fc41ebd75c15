use std::process::{Command, Output};

use serde_json::Value;

fn sgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgl")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = sgl(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (v, out.status.code().unwrap())
}

#[test]
fn cocycle_value() {
    let (v, code) = json(&["cocycle", "--kind", "closed", "--n", "1", "--beta", "0", "L(2)", "L(-2)"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"][0]["value"], "1");
    assert_eq!(v["status"], "pass");
}

#[test]
fn cocycle_kinds_agree_on_spot_value() {
    for kind in ["closed", "trace"] {
        let (v, _) = json(&["cocycle", "--kind", kind, "--n", "2", "--beta", "3", "L(2)", "L(-2)"]);
        assert_eq!(v["entries"][0]["value"], "74", "{kind}");
    }
    let (v, _) = json(&["cocycle", "--kind", "psi", "--n", "1", "L(2)", "L(-2)"]);
    assert_eq!(v["entries"][0]["value"], "-1");
}

#[test]
fn bracket_of_witt_generators() {
    let (v, code) = json(&["bracket", "--n", "1", "L(1)", "L(2)"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"][0]["value"], "L(3)");
    let (v, _) = json(&["bracket", "--n", "2", "E(1,2;1)", "E(2,1;-1)"]);
    assert_eq!(v["entries"][0]["value"], "E(1,1;0) - E(2,2;0)");
}

#[test]
fn negative_expression_arguments() {
    let (v, code) = json(&["bracket", "--n", "1", "-L(1)", "L(2)"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"][0]["value"], "-L(3)");
}

#[test]
fn apply_componentwise() {
    let (v, code) = json(&["apply", "--n", "1", "--beta", "1", "L(0)", "z^2"]);
    assert_eq!(code, 0);
    // z * 2z + 1 * z^2
    assert_eq!(v["entries"][0]["value"], "3*z^2");
    assert_eq!(sgl(&["apply", "--n", "2", "L(0)", "z"]).status.code(), Some(2));
}

#[test]
fn mumford_passes() {
    let (v, code) = json(&["verify", "mumford", "--n", "2", "--beta", "3", "--range", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn krichever_reports_chi() {
    let (v, code) = json(&["krichever", "--degrees", "2,-1"]);
    assert_eq!(code, 0);
    let entries = v["entries"].as_array().unwrap();
    let get = |what: &str| entries.iter().find(|e| e["rhs"] == what).unwrap()["value"].clone();
    assert_eq!(get("index"), "3");
    assert_eq!(get("chi"), "3");
    assert_eq!(get("stabilizer"), "C[z^-1]");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["bracket", "--n", "1", "L(x)", "L(2)"][..],
        &["bracket", "--n", "7", "L(1)", "L(2)"],
        &["bracket", "--n", "1", "E(2,1;0)", "L(2)"],
        &["cocycle", "--kind", "alpha1", "--n", "2", "L(1)", "L(-1)"],
        &["table", "--range", "25"],
        &["verify", "mumford", "--beta", "101"],
        &["krichever", "--degrees", ""],
        &["nonsense"],
    ] {
        let out = sgl(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn output_independent_of_jobs() {
    for args in [&["verify", "oracle", "--n", "2"][..], &["table", "--n", "3", "--beta", "-2"], &["verify", "cocycle-condition", "--n", "2", "--beta", "1"]] {
        let one = sgl(&[args, &["--jobs", "1"]].concat());
        let four = sgl(&[args, &["--jobs", "4"]].concat());
        assert_eq!(one.status.code(), Some(0), "{args:?}");
        assert_eq!(one.stdout, four.stdout, "{args:?}");
    }
}

#[test]
fn formats_and_out_file() {
    let csv = String::from_utf8(sgl(&["table", "--n", "1", "--range", "2", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("section,kind,lhs,rhs,value,expected,note\n"));
    assert!(csv.contains("entry,\"c_{1,0}\",L(-2),L(2),-1,,"), "{csv}");

    let md = String::from_utf8(sgl(&["table", "--n", "2", "--beta", "3", "--range", "2", "--format", "md"]).stdout).unwrap();
    assert!(md.contains("| c_{2,3} |"));
    assert!(md.contains("| L(-2) | L(2) | -2 | -2 | -2 | -74 |"), "{md}");

    let dir = std::env::temp_dir().join(format!("sgl-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let out = sgl(&["verify", "ackp", "--beta", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let a1 = v["entries"].as_array().unwrap().iter().find(|e| e["rhs"] == "a1").unwrap();
    assert_eq!(a1["value"], "-13/6");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn psi_restriction_documents_sigma() {
    let (v, code) = json(&["verify", "psi-restriction", "--n", "1"]);
    assert_eq!(code, 0);
    assert!(v["notes"][0].as_str().unwrap().contains("sigma = -1"));
}
