//! One line per acceptance criterion, exact arithmetic throughout.
//! Criteria that cannot hold as stated fail here and are listed in KNOWN_FAILURES.

use std::time::Instant;

use hopfx::braided;
use hopfx::expr::model_env;
use hopfx::fhopf::{self, FHopfBundle, IsoVariant};
use hopfx::frobenius::{check_spider_theorem, EnumerationBounds, Speciality};
use hopfx::hadamard;
use hopfx::hopf;
use hopfx::models::{self, Model};
use hopfx::report::Report;
use hopfx::scalar::CycScalar;
use hopfx::star;
use hopfx::suites;
use hopfx::tables;
use hopfx::tensor::{Index, TensorMap, Vector};
use hopfx::zxdsl::{self, Instance, RuleCheck};

/// u-1 gate rows, Taft h(K^iF²) rows, printed S̄(F²E²), and the ℎ² = S̄ normalisation gap.
const KNOWN_FAILURES: &[u32] = &[2, 3, 6, 7];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn report_ok(what: &str, r: &Report) -> Result<(), String> {
    let bad: Vec<String> = r.failures().map(|c| format!("{} ({})", c.id, c.detail.as_deref().unwrap_or(""))).collect();
    ensure(bad.is_empty(), format!("{what}: {}", bad.join("; ")))
}

fn table_ok(id: &str) -> Result<usize, String> {
    let t = tables::run_table(id).map_err(|e| e.to_string())?;
    let bad: Vec<String> = t.failures().map(|r| format!("{} printed {} computed {}", r.lhs, r.expected, r.computed)).collect();
    ensure(bad.is_empty(), format!("{id}: {}", bad.join("; ")))?;
    Ok(t.rows.len())
}

fn bundle(m: &Model) -> FHopfBundle {
    fhopf::amplify(&m.hopf, &m.integrals).expect("bundle")
}

fn ac1() -> Outcome {
    for id in ["kX:Z2", "kX:Z3", "kX:S3"] {
        let m = models::build(id).unwrap();
        let b = bundle(&m);
        let d = b.dim();
        let n = m.order();
        for x in 0..d {
            for y in 0..d {
                let want = if x == y { b.base.basis(x) } else { Vector::zero() };
                ensure(b.green_mul(&b.base.basis(x), &b.base.basis(y)) == want, format!("{id}: x∘y at ({x},{y})"))?;
            }
        }
        let all = Vector::from_terms((0..d).map(|x| (x as Index, CycScalar::one(n))));
        ensure(b.green_unit() == &all, format!("{id}: 1_g ≠ Σx"))?;
        let size = CycScalar::from_int(n, d as i64);
        ensure(b.red.mu_of_metric() == b.base.one().scale(&size), format!("{id}: μ_r(g_r) ≠ |X|·1"))?;
        ensure(b.green.classify() == Speciality::Special, format!("{id}: green not special"))?;
        ensure(b.red.classify() == Speciality::Quasispecial(size), format!("{id}: red not quasispecial with λ = |X|"))?;
    }
    table_ok("exCX.frobenius")?;
    Ok("ℤ₂, ℤ₃, S₃".into())
}

fn ac2() -> Outcome {
    let mut errs = Vec::new();
    let gred = table_ok("exsl2.n2.gred");
    let products = table_ok("exsl2.n2.green-products");
    let m = models::build("uqsl2:2").unwrap();
    let b = bundle(&m);
    let gate = hadamard::u_minus_one_gate(&m, &b, IsoVariant::Plain).map_err(|e| e.to_string())?;
    let iso = fhopf::check_hopf_iso(&b.base, &b.associated, &gate.h, IsoVariant::Plain);
    for r in [gred.map(|_| ()), products.map(|_| ()), report_ok("iso", &iso), table_ok("u-1sl2.hadamard").map(|_| ())] {
        if let Err(e) = r {
            errs.push(e);
        }
    }
    if errs.is_empty() {
        Ok("g_red, products, coproducts, isomorphism, gate table".into())
    } else {
        Err(errs.join(" | "))
    }
}

fn ac3() -> Outcome {
    let rows = table_ok("taft.n3.green-product")?;
    table_ok("taft.n3.hadamard")?;
    Ok(format!("{rows} product and metric rows"))
}

fn ac4() -> Outcome {
    for n in [2u32, 3, 4, 8] {
        let m = models::build(&format!("kX:Z{n}")).unwrap();
        let b = bundle(&m);
        let mut theta = hadamard::fourier_form(&b).map_err(|e| e.to_string())?;
        let gate = hadamard::gate_from_form(&b, &theta).map_err(|e| e.to_string())?;
        report_ok(&format!("n={n} type 2"), &hadamard::check_type2(&b, &mut theta, &gate))?;
        report_ok(&format!("n={n} type 1"), &hadamard::check_type1(&b, &mut theta, &gate))?;
        let nn = CycScalar::from_int(n, n as i64);
        ensure(theta.quasi_scalars == (CycScalar::one(n), nn.clone()), format!("n={n}: type 1 scalars {:?}", theta.quasi_scalars))?;
        let d = n as usize;
        for i in 0..d {
            let want = Vector::from_terms((0..d).map(|j| (j as Index, CycScalar::q_pow(n, -((i * j) as i64)))));
            ensure(gate.apply(&b.base.basis(i)) == want, format!("n={n}: ℎ|{i}⟩"))?;
            let neg = Vector::basis(((d - i) % d) as Index, nn.clone());
            ensure(gate.power(2).apply(&b.base.basis(i)) == neg, format!("n={n}: ℎ²|{i}⟩"))?;
        }
        let n2 = TensorMap::identity(&b.base.space, 1).scale(&(&nn * &nn));
        ensure(gate.power(4) == n2, format!("n={n}: ℎ⁴ ≠ n²·id"))?;
    }
    table_ok("hZn.gate")?;
    Ok("n = 2, 3, 4, 8".into())
}

fn ac5() -> Outcome {
    let m = models::build("uqsl2:3").unwrap();
    let h = &m.hopf;
    report_ok("hopf", &hopf::check_hopf(h))?;
    report_ok("quasitriangular", &hopf::check_quasitriangular(h))?;
    report_ok("integrals", &hopf::check_integrals_against(h, &m.integrals))?;
    let env = model_env(&m);
    let top = env.element("K F^2 E^2").unwrap();
    let printed = TensorMap::functional(&h.space, 1, &top);
    ensure(m.integrals.integral == printed, "∫ ≠ δ_{1,i}δ_{2,j}δ_{2,k}")?;
    ensure(m.integrals.lambda_element() == &env.element("(1 + K + K^2) F^2 E^2").unwrap(), "Λ ≠ Λ_K F²E²")?;
    let b = bundle(&m);
    report_ok("bundle", &fhopf::check_bundle(&b))?;
    report_ok("tilde S", &fhopf::check_tilde_s(&b))?;
    table_ok("uqsl2.n3.tildeS-KaF")?;
    let s2 = b.base.antipode.compose(&b.base.antipode).unwrap();
    let ts2 = b.associated.antipode.compose(&b.associated.antipode).unwrap();
    ensure(s2 == ts2, "S² ≠ S̃²")?;
    let st = m.star.as_ref().unwrap();
    report_ok("general star", &star::check_general_star(&b, st))?;
    star::check_rmatrix_dagger(h, st).map_err(|e| format!("𝓡† ≠ 𝓡⁻¹: {e}"))?;
    Ok("axioms, integrals, S̃, S² = S̃², star, 𝓡†".into())
}

struct Braided {
    model: Model,
    b: braided::BraidedHopfData,
    bundle: FHopfBundle,
}

fn braided_n3() -> Braided {
    let model = models::build("uqsl2:3").unwrap();
    let b = braided::transmute(&model.hopf).unwrap();
    let ints = braided::braided_integrals(&b, &model.integrals, None).unwrap();
    let bundle = braided::braided_amplify(&b, &ints).unwrap();
    Braided { model, b, bundle }
}

fn ac6(x: &Braided) -> Outcome {
    let mut errs = Vec::new();
    let mut rows = 0;
    for id in ["bqsl2.n3.coproducts", "bqsl2.n3.braiding", "bqsl2.n3.antipode", "bqsl2.n3.integral", "bqsl2.n3.spotcheck-F"] {
        match table_ok(id) {
            Ok(k) => rows += k,
            Err(e) => errs.push(e),
        }
    }
    for (what, r) in [
        ("transmutation", braided::check_transmutation(&x.b)),
        ("braided antihom", hopf::check_braided_antihom(&x.b.hopf)),
        ("matrix form", braided::check_matrix_form(&x.model, &x.b)),
        ("bundle", fhopf::check_bundle(&x.bundle)),
    ] {
        if let Err(e) = report_ok(what, &r) {
            errs.push(e);
        }
    }
    if !x.bundle.is_braided() {
        errs.push("bundle has no reverse braiding".into());
    }
    if errs.is_empty() {
        Ok(format!("{rows} table rows, suites, bundle"))
    } else {
        Err(errs.join(" | "))
    }
}

fn ac7(x: &Braided) -> Outcome {
    let cert = braided::factorisable(&x.model.hopf).map_err(|e| e.to_string())?;
    let (_, r) = braided::braided_hadamard(&x.b, &x.bundle, &cert).map_err(|e| e.to_string())?;
    let mut errs = Vec::new();
    for id in ["theta-coproduct-left", "theta-coproduct-right", "theta-counit", "gate-squared-braided-antipode", "fourier-squared-inverse-antipode"] {
        match r.get(id) {
            Some(_) if r.passed(id) => {}
            Some(c) => errs.push(format!("{id}: {}", c.detail.as_deref().unwrap_or(""))),
            None => errs.push(format!("{id} missing")),
        }
    }
    if errs.is_empty() {
        Ok("Θ identities, ℎ² = S̄, 𝒮² = S̄⁻¹".into())
    } else {
        let scal = |id: &str| r.get(id).and_then(|c| c.detail.clone()).unwrap_or_default();
        errs.push(format!(
            "observed ℎ² = ({})·S̄ and 𝒮² = ({})·S̄⁻¹",
            scal("gate-squared-proportional"),
            scal("fourier-squared-proportional")
        ));
        Err(errs.join("; "))
    }
}

fn ac8(x: &Braided) -> Outcome {
    let cert = braided::factorisable(&x.model.hopf).map_err(|e| e.to_string())?;
    let (had, _) = braided::braided_hadamard(&x.b, &x.bundle, &cert).map_err(|e| e.to_string())?;
    let (ribbon, r) = braided::ribbon_and_modular(&x.b, &cert, &had.gate);
    match ribbon {
        None => Ok(format!("no ribbon element found (reported): {}", r.summary())),
        Some(rd) => {
            report_ok("modular", &r)?;
            ensure(!rd.lambda.is_zero(), "λ = 0")?;
            Ok(format!("(𝒮𝒯)³ = λ𝒮² with λ = {}", rd.lambda))
        }
    }
}

fn ac9(x: &Braided) -> Outcome {
    let st = x.model.star.as_ref().unwrap();
    let (_, r) = braided::transmuted_star(&x.b, st).map_err(|e| e.to_string())?;
    report_ok("transmuted star", &r)?;
    Ok(format!("{} checks", r.len()))
}

fn ac10() -> Outcome {
    for n in [2u32, 3] {
        let m = models::build(&format!("bline:{n}")).unwrap();
        let r = suites::braided_line_control(&m, n);
        report_ok(&format!("n={n}"), &r)?;
        ensure(r.passed("corollary-fails") && r.passed("adhoc-pairing-differs"), format!("n={n}: control incomplete"))?;
    }
    Ok("corollary fails and ad-hoc pairing differs for n = 2, 3".into())
}

fn observed(rules: &[RuleCheck], name: &str) -> Result<CycScalar, String> {
    rules.iter().find(|r| r.name == name).and_then(|r| r.observed_scalar.clone()).ok_or_else(|| format!("{name}: no observed scalar"))
}

fn std_pack(b: &FHopfBundle, gate: Option<(&hadamard::Gate, (CycScalar, CycScalar))>) -> (Report, Vec<RuleCheck>) {
    let mut rules = zxdsl::parse_rules(zxdsl::rule_pack("std").unwrap()).unwrap();
    let mut inst = Instance::new(b);
    if let Some((g, s)) = gate {
        inst = inst.with_gate(g, Some(s));
    }
    let r = zxdsl::check_rules(&mut rules, &inst);
    (r, rules)
}

fn ac11() -> Outcome {
    let corpus = zxdsl::parse_diagram_file(include_str!("fixtures/corpus.zx")).map_err(|e| e.to_string())?;
    ensure(corpus.len() == 50, format!("corpus has {} diagrams", corpus.len()))?;
    for (name, d) in &corpus {
        ensure(zxdsl::parse(&d.to_string()).as_ref() == Ok(d), format!("{name} does not round-trip"))?;
    }
    for id in ["kX:Z2", "kX:S3"] {
        let m = models::build(id).unwrap();
        let (r, _) = std_pack(&bundle(&m), None);
        for rule in ["green-fusion", "green-fusion-mirror", "green-fusion-assoc", "special-red-fusion"] {
            ensure(r.passed(&format!("rule:{rule}")), format!("{id}: {rule}"))?;
        }
    }
    let m = models::build("kX:Z2").unwrap();
    let (r, rules) = std_pack(&bundle(&m), None);
    report_ok("std pack on kℤ₂", &r)?;
    let two = CycScalar::from_int(2, 2);
    ensure(observed(&rules, "unnormalised-bialgebra")? == two, "unnormalised bialgebra scalar ≠ ε(1) = 2")?;
    ensure(observed(&rules, "red-loop")? == two, "red loop ≠ λ")?;
    ensure(observed(&rules, "red-double-loop")? == &two * &two, "double red loop ≠ λ²")?;
    let m = models::build("kX:Z3").unwrap();
    let b = bundle(&m);
    let mut theta = hadamard::fourier_form(&b).unwrap();
    let gate = hadamard::gate_from_form(&b, &theta).unwrap();
    hadamard::check_type1(&b, &mut theta, &gate);
    let (r, rules) = std_pack(&b, Some((&gate, theta.quasi_scalars.clone())));
    report_ok("std pack on ℂℤ₃", &r)?;
    ensure(observed(&rules, "had-colour-coproduct")?.is_one(), "colour change (a) scalar ≠ 1")?;
    ensure(observed(&rules, "had-colour-product")? == CycScalar::from_int(3, 3), "colour change (b) scalar ≠ 3")?;
    Ok("corpus of 50, fusion, ε(1) = 2, λ and λ², Type 1 scalars 1 and 3".into())
}

fn ac12() -> Outcome {
    let mut out = Vec::new();
    // The green algebra of kX is the function algebra k(X).
    for (id, red, label) in [("kX:Z2", false, "green kℤ₂"), ("kX:S3", false, "k(S₃)"), ("kX:Z2", true, "red kℤ₂")] {
        let m = models::build(id).unwrap();
        let b = bundle(&m);
        let f = if red { &b.red } else { &b.green };
        ensure(red || f.classify() == Speciality::Special, format!("{label} is not special"))?;
        let r = check_spider_theorem(f, EnumerationBounds::default());
        report_ok(label, &r)?;
        out.push(format!("{label}: {}", r.get("spider-theorem").unwrap().detail.clone().unwrap_or_default()));
    }
    Ok(out.join("; "))
}

fn run(id: u32, title: &str, budget_ms: u128, f: impl FnOnce() -> Outcome) -> bool {
    let started = Instant::now();
    let mut outcome = f();
    let ms = started.elapsed().as_millis();
    if outcome.is_ok() && ms > budget_ms {
        outcome = Err(format!("over budget: {ms} ms > {budget_ms} ms"));
    }
    let (status, detail) = match &outcome {
        Ok(d) => ("PASS", d.clone()),
        Err(d) => ("FAIL", d.clone()),
    };
    println!("AC{id:02} {status} {title} ({ms} ms): {detail}");
    outcome.is_ok()
}

fn main() {
    let mut failed = Vec::new();
    let mut check = |id: u32, ok: bool| {
        if !ok {
            failed.push(id);
        }
    };
    check(1, run(1, "kX amplification", 1_000, ac1));
    check(2, run(2, "u_{-1}(sl2) tables, isomorphism and gate", 5_000, ac2));
    check(3, run(3, "Taft n=3 green product and gate", 5_000, ac3));
    check(4, run(4, "ℂℤ_n Fourier gate", 1_000, ac4));
    check(5, run(5, "u_q(sl2) n=3 axioms, integrals, S̃, star", 60_000, ac5));
    let started = Instant::now();
    let x = braided_n3();
    let setup = started.elapsed().as_millis();
    check(6, run(6, "braided b_q(sl2) tables and suites", 300_000 - setup, || ac6(&x)));
    check(7, run(7, "braided Hadamard", 300_000, || ac7(&x)));
    check(8, run(8, "modular identity", 300_000, || ac8(&x)));
    check(9, run(9, "transmuted star", 60_000, || ac9(&x)));
    check(10, run(10, "braided line negative control", 1_000, ac10));
    check(11, run(11, "diagram language", 10_000, ac11));
    check(12, run(12, "spider theorem by enumeration", 30_000, ac12));
    println!("acceptance: {} of 12 pass; failing {:?}", 12 - failed.len(), failed);
    if failed != KNOWN_FAILURES {
        eprintln!("failing criteria changed: expected {KNOWN_FAILURES:?}, got {failed:?}");
        std::process::exit(1);
    }
}
