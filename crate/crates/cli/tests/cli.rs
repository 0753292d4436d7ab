use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hopfx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopfx")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hopfx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn failing_ids(v: &Value) -> Vec<String> {
    v["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").map(|c| c["id"].as_str().unwrap().to_string()).collect()
}

#[test]
fn verify_small_group_passes() {
    let out = hopfx(&["verify", "--model", "kX:Z2", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["model"], "kX:Z2");
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(stderr(&out).contains("passed"));
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut v: Value| {
        v["wall_ms"] = Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(json(&hopfx(&["verify", "--model", "taft:3", "--suite", "all"])));
    let b = strip(json(&hopfx(&["verify", "--model", "taft:3", "--suite", "all"])));
    assert_eq!(a, b);
}

#[test]
fn unknown_ids_exit_2_with_suggestion() {
    let out = hopfx(&["verify", "--model", "uqsl3:3", "--suite", "hopf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("did you mean"), "{}", stderr(&out));
    let out = hopfx(&["verify", "--model", "kX:Z2", "--suite", "frobenious"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("frobenius"));
    let out = hopfx(&["table", "--id", "bqsl2.n3.antipod"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bqsl2.n3.antipode"));
    assert!(out.stdout.is_empty());
}

#[test]
fn tables_diff_against_printed_values() {
    let out = hopfx(&["table", "--id", "u-1sl2.green-products"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["expected"].as_str().unwrap().contains("K")));

    let out = hopfx(&["table", "--id", "taft.n3.hadamard"]);
    assert_eq!(out.status.code(), Some(1));
    let bad = json(&out)["rows"].as_array().unwrap().iter().filter(|r| r["ok"] == false).count();
    assert_eq!(bad, 3);

    let out = hopfx(&["table", "--list"]);
    assert_eq!(json(&out)["tables"].as_array().unwrap().len(), 13);
}

#[test]
fn eval_and_rules() {
    let d = scratch("d.zx", "fuse := (gs(2,1) . gs(1,2));\nloop := (rs(0,2) . rs(2,0));\n");
    let out = hopfx(&["eval", "--model", "kX:Z2", "--bundle", "red-green", "--diagram", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["diagrams"][0]["name"], "fuse");
    assert_eq!(v["diagrams"][1]["outputs"], 0);

    let bad = scratch("bad.zx", "(gs(2,1) . gs(2,1))");
    let out = hopfx(&["eval", "--model", "kX:Z2", "--diagram", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("root"));

    let out = hopfx(&["rules", "--model", "kX:Z3", "--pack", "std"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let r = scratch("r.rules", "wrong : (rs(1,2) . rs(2,1)) == id exact;\n");
    let out = hopfx(&["rules", "--model", "kX:Z2", "--rules", r.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(failing_ids(&json(&out)), vec!["rule:wrong"]);
}

#[test]
fn export_round_trips() {
    let dir = std::env::temp_dir().join(format!("hopfx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("taft.json");
    let out = hopfx(&["export", "--model", "taft:3", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let h = hopfx::hopf::from_json(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(h.dim(), 9);
    assert!(hopfx::hopf::check_hopf(&h).all_passed());
}

#[test]
fn uqsl2_n3_full_report() {
    let out = hopfx(&["verify", "--model", "uqsl2:3", "--suite", "all"]);
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().len() >= 40);
    // The exact braided Hadamard identities miss by the scalars 1/3 and 3.
    assert_eq!(
        failing_ids(&v),
        vec!["braided.hadamard.fourier-squared-inverse-antipode", "braided.hadamard.gate-squared-braided-antipode"]
    );
    assert_eq!(out.status.code(), Some(1));
}
