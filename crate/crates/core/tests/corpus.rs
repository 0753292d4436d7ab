use hopfx::fhopf;
use hopfx::models;
use hopfx::zxdsl::{self, Instance};

const CORPUS: &str = include_str!("fixtures/corpus.zx");

#[test]
fn corpus_round_trips() {
    let diagrams = zxdsl::parse_diagram_file(CORPUS).unwrap();
    assert_eq!(diagrams.len(), 50);
    for (name, node) in &diagrams {
        let text = node.to_string();
        let back = zxdsl::parse(&text).unwrap_or_else(|e| panic!("{name}: {text}: {e}"));
        assert_eq!(&back, node, "{name}");
        assert_eq!(back.to_string(), text, "{name}");
        node.arity().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    let printed: String = diagrams.iter().map(|(n, d)| format!("{n} := {d};\n")).collect();
    assert_eq!(zxdsl::parse_diagram_file(&printed).unwrap(), diagrams);
}

#[test]
fn corpus_compiles_on_kz2() {
    let m = models::build("kX:Z2").unwrap();
    let b = fhopf::amplify(&m.hopf, &m.integrals).unwrap();
    let inst = Instance::new(&b);
    let mut compiled = 0;
    for (name, node) in zxdsl::parse_diagram_file(CORPUS).unwrap() {
        if !node.phases().is_empty() || node.to_string().contains("had") {
            continue;
        }
        let c = inst.compile(&node).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(c.map.arity(), node.arity().unwrap(), "{name}");
        compiled += 1;
    }
    assert!(compiled >= 40, "{compiled}");
}
