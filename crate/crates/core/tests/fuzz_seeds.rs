//! Replays the checked-in fuzz seed corpora through the fuzzed entry points.

use std::path::PathBuf;

use hopfx::expr::model_env;
use hopfx::scalar::CycScalar;
use hopfx::{hopf, models, zxdsl};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter_map(|p| Some((p.file_name()?.to_string_lossy().into_owned(), std::fs::read_to_string(&p).ok()?)))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "{target} has no seeds");
    out
}

#[test]
fn diagram_seeds() {
    let mut parsed = 0;
    for (name, s) in seeds("diagram_parse") {
        if let Ok(node) = zxdsl::parse(&s) {
            assert_eq!(zxdsl::parse(&node.to_string()).as_ref(), Ok(&node), "{name}");
            parsed += 1;
        }
        let _ = zxdsl::parse_diagram_file(&s);
    }
    assert!(parsed >= 50);
}

#[test]
fn rule_seeds() {
    for (name, s) in seeds("rules_parse") {
        if name == "std" || name == "braided" {
            zxdsl::parse_rules(&s).unwrap();
        }
    }
}

#[test]
fn scalar_seeds() {
    for (name, s) in seeds("scalar_parse") {
        if name.starts_with("invalid") {
            assert!(s.parse::<CycScalar>().is_err(), "{name}");
            continue;
        }
        let x: CycScalar = s.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(CycScalar::parse(x.order(), &x.render()).unwrap(), x, "{name}");
    }
}

#[test]
fn hopf_json_seeds() {
    for (name, s) in seeds("hopf_json") {
        let r = hopf::from_json(&s);
        assert_eq!(r.is_ok(), name != "partial.json", "{name}");
    }
}

#[test]
fn element_seeds() {
    let m = models::build("uqsl2:2").unwrap();
    let env = model_env(&m);
    for (_, s) in seeds("element_expr") {
        let _ = env.eval(&s);
    }
}
