//! Verification suites per model, as used by the command line and the
//! acceptance tests.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::braided;
use crate::fhopf::{self, FHopfBundle, IsoVariant};
use crate::frobenius::{check_spider_theorem, EnumerationBounds, Speciality};
use crate::hadamard::{self, Gate, HadamardForm, HadamardType};
use crate::hopf::{self, check_braided_antihom, check_hopf, check_quasitriangular};
use crate::models::{self, Model, ModelError, ModelKind};
use crate::report::{Check, Report, Status};
use crate::scalar::CycScalar;
use crate::star;
use crate::tensor::{Index, TensorMap, Vector};
use crate::zxdsl::{self, DslError, Instance, ParseError};

pub const SUITES: &[&str] = &["hopf", "frobenius", "fhopf", "star", "hadamard", "braided", "all"];

/// Bundles above this dimension are not amplified by the suites.
pub const MAX_BUNDLE_DIM: usize = 64;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown suite {name:?}{}", suggestion.as_ref().map(|s| format!(" (did you mean {s:?}?)")).unwrap_or_default())]
    UnknownSuite { name: String, suggestion: Option<String> },
    #[error("unknown bundle {0:?} (expected red-green or braided)")]
    UnknownBundle(String),
    #[error("unknown rule pack {0:?} (expected std or braided)")]
    UnknownPack(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error("cannot build the bundle: {0}")]
    Bundle(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub model: String,
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    pub notes: usize,
    pub checks: Vec<Check>,
    pub wall_ms: u128,
}

impl SuiteReport {
    pub fn new(model: &str, suite: &str, mut report: Report, started: Instant) -> SuiteReport {
        report.sort();
        let count = |s: Status| report.checks.iter().filter(|c| c.status == s).count();
        SuiteReport {
            schema: 1,
            model: model.into(),
            suite: suite.into(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            notes: count(Status::Note),
            checks: report.checks,
            wall_ms: started.elapsed().as_millis(),
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} checks, {} passed, {} failed, {} notes in {} ms",
            self.model,
            self.suite,
            self.checks.len(),
            self.passed,
            self.failed,
            self.notes,
            self.wall_ms
        )
    }
}

/// A model with its bundle built once and shared across suites.
pub struct Subject {
    pub model: Model,
    pub bundle: Result<FHopfBundle, String>,
}

impl Subject {
    pub fn new(id: &str) -> Result<Subject, ModelError> {
        let model = models::build(id)?;
        let bundle = if model.hopf.dim() > MAX_BUNDLE_DIM {
            Err(format!("dimension {} exceeds the bundle budget {MAX_BUNDLE_DIM}", model.hopf.dim()))
        } else {
            fhopf::amplify(&model.hopf, &model.integrals).map_err(|e| e.to_string())
        };
        Ok(Subject { model, bundle })
    }

    fn bundle_or_note(&self, r: &mut Report, suite: &str) -> Option<&FHopfBundle> {
        match &self.bundle {
            Ok(b) => Some(b),
            Err(e) if matches!(self.model.kind, ModelKind::BraidedLine(_)) => {
                r.note(format!("{suite}.not-applicable"), "corbraHH*", format!("no bundle on the braided line ({e}); see braided.line"));
                None
            }
            Err(e) if self.model.hopf.dim() > MAX_BUNDLE_DIM => {
                r.note(format!("{suite}.skipped"), "corHH*", e.clone());
                None
            }
            Err(e) => {
                r.record(format!("{suite}.amplify"), "corHH*", Err(e.clone()));
                None
            }
        }
    }
}

pub fn check_suite_name(name: &str) -> Result<(), SuiteError> {
    if SUITES.contains(&name) {
        Ok(())
    } else {
        Err(SuiteError::UnknownSuite { name: name.into(), suggestion: models::nearest(name, SUITES) })
    }
}

/// Runs one suite (or `all`) on a registry model.
pub fn run_suite(model_id: &str, suite: &str) -> Result<SuiteReport, SuiteError> {
    check_suite_name(suite)?;
    let started = Instant::now();
    let subject = Subject::new(model_id)?;
    let names: Vec<&str> = if suite == "all" { SUITES[..SUITES.len() - 1].to_vec() } else { vec![suite] };
    let mut r = Report::new();
    for name in names {
        r.merge(match name {
            "hopf" => hopf_suite(&subject),
            "frobenius" => frobenius_suite(&subject),
            "fhopf" => fhopf_suite(&subject),
            "star" => star_suite(&subject),
            "hadamard" => hadamard_suite(&subject),
            _ => braided_suite(&subject),
        });
    }
    Ok(SuiteReport::new(model_id, suite, r, started))
}

pub fn hopf_suite(s: &Subject) -> Report {
    let h = &s.model.hopf;
    let mut r = Report::new();
    if h.is_braided() {
        r.merge_prefixed("hopf", check_hopf(h));
        r.merge_prefixed("hopf.braided", check_braided_antihom(h));
    } else {
        r.merge_prefixed("hopf", check_hopf(h));
    }
    if h.rmatrix.is_some() {
        r.merge_prefixed("hopf.quasitriangular", check_quasitriangular(h));
    }
    match hopf::right_integral_space(h).len() {
        1 => r.pass_with("hopf.integral-space", "corHH*", "dimension 1"),
        k => r.record("hopf.integral-space", "corHH*", Err(format!("right integral space has dimension {k}"))),
    }
    r.merge_prefixed("hopf.integrals", hopf::check_integrals_against(h, &s.model.integrals));
    r.merge_prefixed("hopf.unimodular", hopf::check_unimodular_flags(h, &s.model.integrals));
    r
}

pub fn frobenius_suite(s: &Subject) -> Report {
    let mut r = Report::new();
    let Some(b) = s.bundle_or_note(&mut r, "frobenius") else { return r };
    for (name, f) in [("red", &b.red), ("green", &b.green)] {
        r.merge_prefixed(&format!("frobenius.{name}"), f.check());
        let kind = match f.classify() {
            Speciality::Special => "special".to_string(),
            Speciality::Quasispecial(l) => format!("quasispecial, λ = {l}"),
            Speciality::Neither => "neither special nor quasispecial".to_string(),
        };
        r.note(format!("frobenius.{name}.type"), "defFalg", kind);
        if f.loop_scalar().is_some() && f.dim() <= 6 {
            let bounds = EnumerationBounds { max_nodes: 4, max_inputs: 2, max_wires: 3 };
            r.merge_prefixed(&format!("frobenius.{name}"), check_spider_theorem(f, bounds));
        }
    }
    r
}

pub fn fhopf_suite(s: &Subject) -> Report {
    let mut r = Report::new();
    let Some(b) = s.bundle_or_note(&mut r, "fhopf") else { return r };
    r.merge_prefixed("fhopf.bundle", fhopf::check_bundle(b));
    r.merge_prefixed("fhopf.interaction", fhopf::check_interaction(b));
    r.merge_prefixed("fhopf.tilde-s", fhopf::check_tilde_s(b));
    let (e, i) = fhopf::quasispecial_constants(b);
    r.note("fhopf.quasispecial-constants", "exsl2", format!("ε(Λ) = {e}, ∫1 = {i}"));
    r
}

pub fn star_suite(s: &Subject) -> Report {
    let mut r = Report::new();
    let Some(st) = &s.model.star else {
        r.note("star.none", "starform", "model has no *-structure");
        return r;
    };
    let h = &s.model.hopf;
    r.merge_prefixed("star.flip", star::check_flip_star(h, st));
    if h.rmatrix.is_some() {
        r.record("star.rmatrix-dagger", "intstar", star::check_rmatrix_dagger(h, st));
    }
    let Some(b) = s.bundle_or_note(&mut r, "star") else { return r };
    r.merge_prefixed("star.general", star::check_general_star(b, st));
    if matches!(s.model.kind, ModelKind::Group(_)) {
        r.merge_prefixed("star.unimodular", star::check_unimodular_star(b, st));
    }
    r
}

/// The gate shipped for a model, if any, with its form and expected type.
pub fn model_gate(m: &Model, b: &FHopfBundle) -> Option<Result<(Gate, HadamardForm, HadamardType), String>> {
    let e = |x: crate::hopf::HopfError| x.to_string();
    match &m.kind {
        ModelKind::Group(_) if m.id.starts_with("kX:Z") && b.dim() == b.order() as usize => Some((|| {
            let theta = hadamard::fourier_form(b).map_err(e)?;
            let gate = hadamard::gate_from_form(b, &theta).map_err(e)?;
            Ok((gate, theta, HadamardType::One))
        })()),
        ModelKind::Taft(3) => Some((|| {
            let gate = hadamard::taft_gate(m, b).map_err(e)?;
            let theta = hadamard::form_from_gate(b, &gate).map_err(e)?;
            Ok((gate, theta, HadamardType::Two))
        })()),
        ModelKind::Uqsl2(2) => Some((|| {
            let gate = hadamard::u_minus_one_gate(m, b, IsoVariant::Plain).map_err(e)?;
            let theta = hadamard::form_from_gate(b, &gate).map_err(e)?;
            Ok((gate, theta, HadamardType::Three))
        })()),
        _ => None,
    }
}

pub fn hadamard_suite(s: &Subject) -> Report {
    let mut r = Report::new();
    let Some(b) = s.bundle_or_note(&mut r, "hadamard") else { return r };
    let m = &s.model;
    match model_gate(m, b) {
        None => r.note("hadamard.none", "defhad", "no Hadamard gate is tabulated for this model"),
        Some(Err(e)) => r.record("hadamard.gate", "defhad", Err(e)),
        Some(Ok((gate, mut theta, kind))) => {
            match kind {
                HadamardType::One => {
                    r.merge_prefixed("hadamard.type1", hadamard::check_type1(b, &mut theta, &gate));
                    r.merge_prefixed("hadamard.type2", hadamard::check_type2(b, &mut theta, &gate));
                    let n = b.dim() as i64;
                    let nn = CycScalar::from_int(b.order(), n);
                    let h2 = gate.power(2);
                    let neg = TensorMap::from_fn(&b.base.space, 1, 1, |i| {
                        let j = (n - i as i64).rem_euclid(n) as Index;
                        Vector::basis(j, nn.clone())
                    });
                    r.record("hadamard.square", "exhZn", h2.diff(&neg).map_or(Ok(()), Err));
                    let n2 = TensorMap::identity(&b.base.space, 1).scale(&(&nn * &nn));
                    r.record("hadamard.fourth-power", "exhZn", gate.power(4).diff(&n2).map_or(Ok(()), Err));
                }
                HadamardType::Two => {
                    r.merge_prefixed("hadamard.type2", hadamard::check_type2(b, &mut theta, &gate));
                    r.merge_prefixed("hadamard.iso", fhopf::check_hopf_iso(&b.base, &b.associated, &gate.h, IsoVariant::Op));
                }
                HadamardType::Three => {
                    r.merge_prefixed("hadamard.type3", hadamard::check_type3(b, &mut theta, &gate));
                    r.merge_prefixed("hadamard.iso", fhopf::check_hopf_iso(&b.base, &b.associated, &gate.h, IsoVariant::Plain));
                    if let Ok(op) = hadamard::u_minus_one_gate(m, b, IsoVariant::Op) {
                        if let Ok(mut t2) = hadamard::form_from_gate(b, &op) {
                            r.merge_prefixed("hadamard.derived-type2", hadamard::check_type2(b, &mut t2, &op));
                        }
                    }
                }
            }
            r.record("hadamard.form-gate-round-trip", "defhad", match hadamard::gate_from_form(b, &theta) {
                Ok(g) if g == gate => Ok(()),
                Ok(_) => Err("gate from form differs".into()),
                Err(e) => Err(e.to_string()),
            });
        }
    }
    r
}

pub fn braided_suite(s: &Subject) -> Report {
    let mut r = Report::new();
    let m = &s.model;
    if let ModelKind::BraidedLine(n) = m.kind {
        r.merge_prefixed("braided.line", braided_line_control(m, n));
        return r;
    }
    if m.hopf.rmatrix.is_none() {
        r.note("braided.none", "proptransH", "model is not quasitriangular");
        return r;
    }
    let b = match braided::transmute(&m.hopf) {
        Ok(b) => b,
        Err(e) => {
            r.record("braided.transmute", "proptransH", Err(e.to_string()));
            return r;
        }
    };
    r.merge_prefixed("braided.transmutation", braided::check_transmutation(&b));
    if let ModelKind::Uqsl2(n) = m.kind {
        if n % 2 == 1 {
            r.merge_prefixed("braided.matrix-form", braided::check_matrix_form(m, &b));
        }
    }
    if m.hopf.dim() > MAX_BUNDLE_DIM {
        r.note("braided.bundle.skipped", "corbraHH*", format!("dimension {} exceeds the bundle budget", m.hopf.dim()));
        return r;
    }
    let ints = match braided::braided_integrals(&b, &m.integrals, None) {
        Ok(i) => i,
        Err(e) => {
            r.record("braided.integrals", "corbraHH*", Err(e.to_string()));
            return r;
        }
    };
    r.merge_prefixed("braided.integrals", braided::check_braided_integrals(&b, &ints));
    let bundle = match braided::braided_amplify(&b, &ints) {
        Ok(x) => x,
        Err(e) => {
            r.record("braided.bundle", "corbraHH*", Err(e.to_string()));
            return r;
        }
    };
    r.merge_prefixed("braided.bundle", fhopf::check_bundle(&bundle));
    if let Some(st) = &m.star {
        if let Err(e) = star::check_rmatrix_dagger(&m.hopf, st) {
            r.note("braided.star.not-applicable", "transtar", format!("hypothesis 𝓡† = 𝓡⁻¹ fails: {e}"));
        } else {
            match braided::transmuted_star(&b, st) {
            Ok((_, rs)) => r.merge_prefixed("braided.star", rs),
                Err(e) => r.record("braided.star", "transtar", Err(e.to_string())),
            }
        }
    }
    match braided::factorisable(&m.hopf) {
        Ok(cert) if cert.invertible => {
            r.pass_with("braided.factorisable", "proptransH", format!("rank {}", cert.rank));
            match braided::braided_hadamard(&b, &bundle, &cert) {
                Ok((bh, rh)) => {
                    r.merge_prefixed("braided.hadamard", rh);
                    let (_, rm) = braided::ribbon_and_modular(&b, &cert, &bh.gate);
                    r.merge_prefixed("braided.ribbon", rm);
                }
                Err(e) => r.record("braided.hadamard", "modh2", Err(e.to_string())),
            }
        }
        Ok(cert) => r.note("braided.factorisable", "proptransH", format!("not factorisable: 𝓠 has rank {} < {}", cert.rank, m.hopf.dim())),
        Err(e) => r.record("braided.factorisable", "proptransH", Err(e.to_string())),
    }
    r
}

/// Negative control on the braided line: the braided corollary's construction
/// must fail, and the ad-hoc pairing δ_{n−1,a+b} must differ from ∫∘μ∘(S⊗id).
/// Each expected failure is recorded as a pass of the control.
pub fn braided_line_control(m: &Model, n: u32) -> Report {
    let mut r = Report::new();
    let h = &m.hopf;
    let anchor = "corbraHH*";
    match fhopf::amplify(&m.hopf, &m.integrals) {
        Err(e) => r.pass_with("corollary-fails", anchor, e.to_string()),
        Ok(b) => {
            let c = fhopf::check_bundle(&b);
            let first = c.failures().next().map(|f| f.id.clone());
            match first {
                Some(id) => r.pass_with("corollary-fails", anchor, format!("{id} fails")),
                None => r.record("corollary-fails", anchor, Err("the bundle verified on the braided line".into())),
            }
        }
    }
    let d = h.dim();
    let one = CycScalar::one(h.order());
    let adhoc = Vector::from_terms(
        (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).filter(|(a, b)| a + b == n as usize - 1).map(|(a, b)| ((a * d + b) as Index, one.clone())),
    );
    let adhoc = TensorMap::functional(&h.space, 2, &adhoc);
    let form = h
        .antipode
        .tensor(&TensorMap::identity(&h.space, 1))
        .and_then(|s1| s1.compose(&h.mu))
        .and_then(|x| x.compose(&m.integrals.integral))
        .ok();
    match form {
        Some(f) if f != adhoc => r.pass_with("adhoc-pairing-differs", anchor, "δ_{n−1,a+b} ≠ ∫∘μ∘(S⊗id)"),
        Some(_) => r.record("adhoc-pairing-differs", anchor, Err("the ad-hoc pairing equals ∫∘μ∘(S⊗id)".into())),
        None => r.record("adhoc-pairing-differs", anchor, Err("could not compose ∫∘μ∘(S⊗id)".into())),
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleKind {
    RedGreen,
    Braided,
}

impl BundleKind {
    pub fn parse(name: &str) -> Result<BundleKind, SuiteError> {
        match name {
            "red-green" => Ok(BundleKind::RedGreen),
            "braided" => Ok(BundleKind::Braided),
            _ => Err(SuiteError::UnknownBundle(name.into())),
        }
    }
}

/// The ordinary F-Hopf bundle, or the one amplified from the transmuted algebra.
pub fn build_bundle(m: &Model, kind: BundleKind) -> Result<FHopfBundle, SuiteError> {
    if m.hopf.dim() > MAX_BUNDLE_DIM {
        return Err(SuiteError::Bundle(format!("dimension {} exceeds the bundle budget {MAX_BUNDLE_DIM}", m.hopf.dim())));
    }
    let err = |e: String| SuiteError::Bundle(e);
    match kind {
        BundleKind::RedGreen => fhopf::amplify(&m.hopf, &m.integrals).map_err(|e| err(e.to_string())),
        BundleKind::Braided => {
            let b = braided::transmute(&m.hopf).map_err(|e| err(e.to_string()))?;
            let ints = braided::braided_integrals(&b, &m.integrals, None).map_err(|e| err(e.to_string()))?;
            braided::braided_amplify(&b, &ints).map_err(|e| err(e.to_string()))
        }
    }
}

/// Checks a rule file (or a shipped pack) on a model. The std pack runs on the
/// red-green bundle with the model's gate, the braided pack on the braided bundle.
pub fn run_rules(model_id: &str, pack: &str, rules: Option<&str>) -> Result<SuiteReport, SuiteError> {
    let started = Instant::now();
    let text = match rules {
        Some(t) => t,
        None => zxdsl::rule_pack(pack).ok_or_else(|| SuiteError::UnknownPack(pack.into()))?,
    };
    let kind = match pack {
        "std" => BundleKind::RedGreen,
        "braided" => BundleKind::Braided,
        _ => return Err(SuiteError::UnknownPack(pack.into())),
    };
    let mut checks = zxdsl::parse_rules(text)?;
    let m = models::build(model_id)?;
    let b = build_bundle(&m, kind)?;
    let gate = match kind {
        BundleKind::RedGreen => model_gate(&m, &b).and_then(Result::ok),
        BundleKind::Braided => None,
    };
    let mut inst = Instance::new(&b);
    if let Some((gate, theta, t)) = &gate {
        let type1 = (*t == HadamardType::One).then(|| {
            let mut th = theta.clone();
            hadamard::check_type1(&b, &mut th, gate);
            th.quasi_scalars
        });
        inst = inst.with_gate(gate, type1);
    }
    let r = zxdsl::check_rules(&mut checks, &inst);
    Ok(SuiteReport::new(model_id, &format!("rules:{pack}"), r, started))
}

#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub name: String,
    pub diagram: String,
    pub inputs: usize,
    pub outputs: usize,
    /// One line per nonzero column: input basis tensor ↦ output vector.
    pub columns: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub schema: u32,
    pub model: String,
    pub bundle: String,
    pub diagrams: Vec<Evaluation>,
}

/// Compiles every diagram of a diagram file against a model's bundle.
pub fn eval_diagrams(model_id: &str, bundle: &str, text: &str) -> Result<EvalReport, SuiteError> {
    let kind = BundleKind::parse(bundle)?;
    let diagrams = zxdsl::parse_diagram_file(text)?;
    let m = models::build(model_id)?;
    let b = build_bundle(&m, kind)?;
    let inst = Instance::new(&b);
    let space = &b.base.space;
    let mut out = Vec::new();
    for (name, node) in diagrams {
        let c = inst.compile(&node)?;
        let (inputs, outputs) = c.map.arity();
        let columns = c
            .map
            .columns()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| {
                let arg = if inputs == 0 { "1".to_string() } else { space.multi_label(j as Index, inputs) };
                format!("{arg} ↦ {}", v.render(space, outputs))
            })
            .collect();
        out.push(Evaluation { name, diagram: node.to_string(), inputs, outputs, columns, warnings: c.warnings });
    }
    Ok(EvalReport { schema: 1, model: model_id.into(), bundle: bundle.into(), diagrams: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_names() {
        assert!(matches!(run_suite("kX:Z9x", "hopf"), Err(SuiteError::Model(_))));
        match run_suite("kX:Z2", "hopff") {
            Err(SuiteError::UnknownSuite { suggestion, .. }) => assert_eq!(suggestion.as_deref(), Some("hopf")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_models_pass_everything() {
        for id in ["kX:Z2", "kX:Z3", "kX:S3", "taft:3"] {
            let rep = run_suite(id, "all").unwrap();
            let bad: Vec<_> = rep.checks.iter().filter(|c| c.status == Status::Fail).collect();
            assert!(bad.is_empty(), "{id}: {bad:?}");
        }
    }

    #[test]
    fn braided_line_negative_control() {
        for id in ["bline:2", "bline:3"] {
            let rep = run_suite(id, "braided").unwrap();
            assert!(rep.ok(), "{id}: {:?}", rep.checks);
            assert_eq!(rep.passed, 2);
            assert!(run_suite(id, "all").unwrap().ok());
        }
    }

    #[test]
    fn rules_and_eval() {
        let rep = run_rules("kX:Z3", "std", None).unwrap();
        assert!(rep.ok(), "{:?}", rep.checks);
        let ev = eval_diagrams("kX:Z2", "red-green", "m := gs(2,1);\nl := (rs(0,1) . rs(1,0));").unwrap();
        assert_eq!(ev.diagrams.len(), 2);
        assert_eq!((ev.diagrams[0].inputs, ev.diagrams[0].outputs), (2, 1));
        assert_eq!(ev.diagrams[1].columns.len(), 1);
        assert!(matches!(eval_diagrams("kX:Z2", "blue", "id"), Err(SuiteError::UnknownBundle(_))));
        assert!(matches!(eval_diagrams("kX:Z2", "red-green", "rs(1,"), Err(SuiteError::Parse(_))));
    }

    #[test]
    fn report_is_sorted_and_counted() {
        let rep = run_suite("kX:Z2", "hopf").unwrap();
        let ids: Vec<&str> = rep.checks.iter().map(|c| c.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert_eq!(rep.passed + rep.failed + rep.notes, rep.checks.len());
    }
}
