use hopfx::fhopf::{self, FHopfBundle};
use hopfx::hopf;
use hopfx::models;
use hopfx::scalar::CycScalar;
use hopfx::tensor::{Index, Vector};
use hopfx::zxdsl::{self, Color, Instance, Node};
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;

const ORDERS: &[u32] = &[1, 2, 3, 4, 5, 6, 8, 12];

fn scalar(n: u32) -> impl Strategy<Value = CycScalar> {
    let d = hopfx::scalar::totient(n);
    prop::collection::vec((-6i64..=6, 1i64..=4), d).prop_map(move |cs| {
        let coeffs: Vec<BigRational> = cs.into_iter().map(|(p, r)| BigRational::new(p.into(), r.into())).collect();
        CycScalar::from_poly(n, &coeffs)
    })
}

fn scalar_triple() -> impl Strategy<Value = (CycScalar, CycScalar, CycScalar)> {
    prop::sample::select(ORDERS).prop_flat_map(|n| (scalar(n), scalar(n), scalar(n)))
}

proptest! {
    #[test]
    fn field_axioms((a, b, c) in scalar_triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism((a, b, _c) in scalar_triple()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        let q = CycScalar::q(a.order());
        prop_assert!((&q * &q.conj()).is_one());
    }

    #[test]
    fn text_form_round_trips((a, _b, _c) in scalar_triple()) {
        let back = CycScalar::parse(a.order(), &a.render()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn powers_of_q_cycle(n in prop::sample::select(ORDERS), k in -40i64..40) {
        prop_assert_eq!(CycScalar::q_pow(n, k), CycScalar::q_pow(n, k + n as i64));
        prop_assert_eq!(CycScalar::q(n).pow(k).unwrap(), CycScalar::q_pow(n, k));
    }
}

fn element(h: &hopf::HopfData) -> impl Strategy<Value = Vector> {
    let d = h.dim();
    let n = h.order();
    prop::collection::vec((0..d, -3i64..=3), 1..4)
        .prop_map(move |ts| Vector::from_terms(ts.into_iter().map(|(i, c)| (i as Index, CycScalar::from_int(n, c)))))
}

fn model(id: &str) -> &'static models::Model {
    static CACHE: OnceLock<Vec<models::Model>> = OnceLock::new();
    let all = CACHE.get_or_init(|| ["uqsl2:2", "taft:3", "kX:S3", "fun:S3"].iter().map(|i| models::build(i).unwrap()).collect());
    all.iter().find(|m| m.id == id).expect("cached model")
}

fn pair_on(id: &'static str) -> impl Strategy<Value = (Vector, Vector)> {
    let h = &model(id).hopf;
    (element(h), element(h))
}

fn hopf_pair() -> impl Strategy<Value = (&'static str, Vector, Vector)> {
    prop::sample::select(vec!["uqsl2:2", "taft:3", "kX:S3", "fun:S3"]).prop_flat_map(|id| pair_on(id).prop_map(move |(a, b)| (id, a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coproduct_is_multiplicative((id, a, b) in hopf_pair()) {
        let h = &model(id).hopf;
        let lhs = h.coproduct(&h.mul(&a, &b));
        let rhs = h.mul_tensor(&h.coproduct(&a), &h.coproduct(&b), 2);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn antipode_is_antimultiplicative((id, a, b) in hopf_pair()) {
        let h = &model(id).hopf;
        prop_assert_eq!(h.s(&h.mul(&a, &b)), h.mul(&h.s(&b), &h.s(&a)));
        prop_assert_eq!(h.s_inv(&h.s(&a)), a);
    }

    #[test]
    fn counit_is_multiplicative((id, a, b) in hopf_pair()) {
        let h = &model(id).hopf;
        prop_assert_eq!(h.eps(&h.mul(&a, &b)), &h.eps(&a) * &h.eps(&b));
    }
}

fn bundles() -> &'static [(String, FHopfBundle)] {
    static CACHE: OnceLock<Vec<(String, FHopfBundle)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        ["kX:Z2", "kX:Z3", "kX:S3", "taft:3"]
            .iter()
            .map(|id| {
                let m = models::build(id).unwrap();
                (id.to_string(), fhopf::amplify(&m.hopf, &m.integrals).unwrap())
            })
            .collect()
    })
}

fn spider(color: Color, inputs: usize, outputs: usize) -> Node {
    Node::Spider { color, inputs, outputs, phase: None }
}

fn color() -> impl Strategy<Value = Color> {
    prop_oneof![Just(Color::Red), Just(Color::Green)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compiled_spiders_are_the_algebra_spiders(b in 0..4usize, c in color(), m in 0..4usize, n in 0..4usize) {
        let (_, bundle) = &bundles()[b];
        let inst = Instance::new(bundle);
        let got = inst.compile(&spider(c, m, n)).unwrap().map;
        prop_assert_eq!(got, inst.algebra(c).spider(m, n, None));
    }

    #[test]
    fn green_fusion_on_group_algebras(b in 0..3usize, m in 1..4usize, k in 1..3usize, n in 1..4usize) {
        // The green algebra of kX is special, so connected green spiders fuse exactly
        // whatever the number of internal wires.
        let (_, bundle) = &bundles()[b];
        let inst = Instance::new(bundle);
        let fused = Node::Compose(vec![spider(Color::Green, m, k), spider(Color::Green, k, n)]);
        let lhs = inst.compile(&fused).unwrap().map;
        let rhs = inst.compile(&spider(Color::Green, m, n)).unwrap().map;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compile_respects_composition_and_tensor(b in 0..4usize, c1 in color(), c2 in color(), m in 0..3usize, k in 1..3usize, n in 0..3usize) {
        let (_, bundle) = &bundles()[b];
        let inst = Instance::new(bundle);
        let x = spider(c1, m, k);
        let y = spider(c2, k, n);
        let xm = inst.compile(&x).unwrap().map;
        let ym = inst.compile(&y).unwrap().map;
        let composed = inst.compile(&Node::Compose(vec![x.clone(), y.clone()])).unwrap().map;
        prop_assert_eq!(composed, xm.compose(&ym).unwrap());
        let tensored = inst.compile(&Node::Tensor(vec![x, y])).unwrap().map;
        prop_assert_eq!(tensored, xm.tensor(&ym).unwrap());
    }
}

fn atom() -> impl Strategy<Value = Node> {
    prop_oneof![
        (color(), 0..4usize, 0..4usize, prop::option::of(prop::sample::select(vec!["a", "b2", "phi"])))
            .prop_map(|(color, inputs, outputs, p)| Node::Spider { color, inputs, outputs, phase: p.map(str::to_string) }),
        Just(Node::Had),
        Just(Node::HadInv),
        color().prop_map(Node::Cup),
        color().prop_map(Node::Cap),
        Just(Node::Braid),
        Just(Node::BraidInv),
        Just(Node::Swap),
        Just(Node::Anti),
        Just(Node::AntiInv),
        (0..4usize).prop_map(Node::Id),
    ]
}

fn term() -> impl Strategy<Value = Node> {
    atom().prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Node::Compose),
            prop::collection::vec(inner, 2..4).prop_map(Node::Tensor),
        ]
    })
}

proptest! {
    #[test]
    fn printed_terms_parse_back(t in term()) {
        let text = t.to_string();
        let back = zxdsl::parse(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn parser_never_panics(s in "[a-z0-9(),.*\\[\\] '#:=;]{0,40}") {
        let _ = zxdsl::parse(&s);
        let _ = zxdsl::parse_rules(&s);
        let _ = zxdsl::parse_diagram_file(&s);
    }
}

#[test]
fn hopf_json_round_trips_for_every_small_model() {
    for id in models::REGISTRY.iter().filter(|i| !i.starts_with("uqsl2:5")) {
        let h = models::build(id).unwrap().hopf;
        let back = hopf::from_json(&hopf::to_json(&h)).unwrap();
        assert_eq!(hopf::to_json(&back), hopf::to_json(&h), "{id}");
    }
}
