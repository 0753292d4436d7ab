//! Frobenius forms and F-algebras, special/quasispecial classification,
//! spiders, planar-term enumeration and phases.

use std::sync::Arc;

use crate::hopf::HopfError;
use crate::report::Report;
use crate::scalar::CycScalar;
use crate::tensor::{apply_layer, Accum, AntiLinear, Index, Part, Space, TensorMap, Vector};

/// An F-algebra: product and coproduct tied by a nondegenerate form and its metric.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusAlgebra {
    pub space: Arc<Space>,
    pub mu: TensorMap,
    pub unit: TensorMap,
    pub form: TensorMap,
    pub metric: TensorMap,
    pub delta: TensorMap,
    pub counit: TensorMap,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Speciality {
    Special,
    Quasispecial(CycScalar),
    Neither,
}

fn mul_with(mu: &TensorMap, a: &Vector, b: &Vector) -> Vector {
    let d = mu.space().dim() as Index;
    let mut acc = Accum::new();
    for (i, x) in a.iter() {
        for (j, y) in b.iter() {
            acc.add_scaled(mu.column(i * d + j), &(x * y));
        }
    }
    acc.finish()
}

fn pair_with(form: &TensorMap, a: &Vector, b: &Vector) -> CycScalar {
    let d = form.space().dim() as Index;
    let mut acc = CycScalar::zero(form.space().order());
    for (i, x) in a.iter() {
        for (j, y) in b.iter() {
            let v = form.value_at(i * d + j);
            if !v.is_zero() {
                acc += &(&(x * y) * &v);
            }
        }
    }
    acc
}

impl FrobeniusAlgebra {
    /// From an algebra and a nondegenerate form: Δa = g¹⊗g²a, ε = (·,1).
    pub fn from_form(mu: &TensorMap, unit: &TensorMap, form: &TensorMap) -> Result<FrobeniusAlgebra, HopfError> {
        let metric = form.invert()?;
        Ok(FrobeniusAlgebra::from_form_and_metric(mu, unit, form, &metric))
    }

    /// As [`from_form`](Self::from_form) with a metric supplied rather than inverted;
    /// the snake identities are then a checked property, not a construction.
    pub fn from_form_and_metric(mu: &TensorMap, unit: &TensorMap, form: &TensorMap, metric: &TensorMap) -> FrobeniusAlgebra {
        let space = mu.space().clone();
        let metric = metric.clone();
        let d = space.dim() as Index;
        let g = metric.as_element().clone();
        let delta = TensorMap::from_fn(&space, 1, 2, |a| {
            let mut acc = Accum::new();
            for (i, c) in g.iter() {
                let right = mu.column((i % d) * d + a);
                acc.add_scaled(&Vector::basis(i / d, c.clone()).tensor(right, d), &space.one());
            }
            acc.finish()
        });
        let one = unit.as_element().clone();
        let counit = TensorMap::from_fn(&space, 1, 0, |a| {
            let v = pair_with(form, &Vector::basis(a, space.one()), &one);
            if v.is_zero() {
                Vector::zero()
            } else {
                Vector::basis(0, v)
            }
        });
        FrobeniusAlgebra { space, mu: mu.clone(), unit: unit.clone(), form: form.clone(), metric, delta, counit }
    }

    /// From a coalgebra and a nondegenerate metric: μ(a⊗b) = a₁(a₂,b), 1 = (ε⊗id)g.
    pub fn from_metric(delta: &TensorMap, counit: &TensorMap, metric: &TensorMap) -> Result<FrobeniusAlgebra, HopfError> {
        let form = metric.invert()?;
        Ok(FrobeniusAlgebra::from_metric_and_form(delta, counit, metric, &form))
    }

    pub fn from_metric_and_form(delta: &TensorMap, counit: &TensorMap, metric: &TensorMap, form: &TensorMap) -> FrobeniusAlgebra {
        let space = delta.space().clone();
        let d = space.dim() as Index;
        let mu = TensorMap::from_fn(&space, 2, 1, |j| {
            let (a, b) = (j / d, j % d);
            let mut acc = Accum::new();
            for (i, c) in delta.column(a).iter() {
                let v = form.value_at((i % d) * d + b);
                if !v.is_zero() {
                    acc.push(i / d, c * &v);
                }
            }
            acc.finish()
        });
        let mut acc = Accum::new();
        for (i, c) in metric.as_element().iter() {
            let e = counit.value_at(i / d);
            if !e.is_zero() {
                acc.push(i % d, c * &e);
            }
        }
        let unit = TensorMap::element(&space, 1, acc.finish());
        FrobeniusAlgebra { space, mu, unit, form: form.clone(), metric: metric.clone(), delta: delta.clone(), counit: counit.clone() }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn order(&self) -> u32 {
        self.space.order()
    }

    pub fn basis(&self, i: usize) -> Vector {
        Vector::basis(i as Index, self.space.one())
    }

    pub fn one(&self) -> &Vector {
        self.unit.as_element()
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        mul_with(&self.mu, a, b)
    }

    pub fn pair(&self, a: &Vector, b: &Vector) -> CycScalar {
        pair_with(&self.form, a, b)
    }

    /// Left multiplication by `a` as a (1,1) map.
    pub fn left_mul(&self, a: &Vector) -> TensorMap {
        TensorMap::from_fn(&self.space, 1, 1, |j| self.mul(a, &Vector::basis(j, self.space.one())))
    }

    /// μ(g): the element with μΔ = left multiplication by it.
    pub fn mu_of_metric(&self) -> Vector {
        self.mu.apply(self.metric.as_element())
    }

    pub fn classify(&self) -> Speciality {
        let mg = self.mu_of_metric();
        if &mg == self.one() {
            return Speciality::Special;
        }
        match mg.ratio_to(self.one()) {
            Some(l) if !l.is_zero() => Speciality::Quasispecial(l),
            _ => Speciality::Neither,
        }
    }

    /// The proportionality constant λ with μΔ = λ·id (1 when special).
    pub fn loop_scalar(&self) -> Option<CycScalar> {
        match self.classify() {
            Speciality::Special => Some(CycScalar::one(self.order())),
            Speciality::Quasispecial(l) => Some(l),
            Speciality::Neither => None,
        }
    }

    /// Δ^{(n−1)} ∘ L_α ∘ μ^{(m−1)}.
    pub fn spider(&self, m: usize, n: usize, phase: Option<&Vector>) -> TensorMap {
        let s = &self.space;
        let mut top = match m {
            0 => self.unit.clone(),
            _ => TensorMap::identity(s, 1),
        };
        for k in 2..=m {
            top = top.tensor(&TensorMap::identity(s, 1)).and_then(|t| t.compose(&self.mu)).expect("arity");
            debug_assert_eq!(top.inputs(), k);
        }
        if let Some(a) = phase {
            top = top.compose(&self.left_mul(a)).expect("arity");
        }
        match n {
            0 => top.compose(&self.counit).expect("arity"),
            _ => {
                let mut out = top;
                for k in 1..n {
                    let layer = self.delta.tensor(&TensorMap::identity(s, k - 1)).expect("arity");
                    out = out.compose(&layer).expect("arity");
                }
                out
            }
        }
    }

    pub fn check(&self) -> Report {
        let mut r = Report::new();
        let s = &self.space;
        let id = TensorMap::identity(s, 1);
        let cmp = |a: Result<TensorMap, _>, b: Result<TensorMap, _>| -> Result<(), String> {
            let (a, b): (TensorMap, TensorMap) = (a.map_err(|e: crate::tensor::TensorError| e.to_string())?, b.map_err(|e: crate::tensor::TensorError| e.to_string())?);
            match a.diff(&b) {
                None => Ok(()),
                Some(w) => Err(w),
            }
        };
        let snake_l = id.tensor(&self.metric).and_then(|x| x.compose(&self.form.tensor(&id)?));
        let snake_r = self.metric.tensor(&id).and_then(|x| x.compose(&id.tensor(&self.form)?));
        r.record("snake-left", "frobenius-form", cmp(snake_l, Ok(id.clone())));
        r.record("snake-right", "frobenius-form", cmp(snake_r, Ok(id.clone())));
        r.record(
            "frobenius-law",
            "frobenius-form",
            cmp(self.mu.tensor(&id).and_then(|x| x.compose(&self.form)), id.tensor(&self.mu).and_then(|x| x.compose(&self.form))),
        );
        r.record("metric-central", "gcentral", self.check_metric_central());
        r.record(
            "associativity",
            "defFalg",
            cmp(self.mu.tensor(&id).and_then(|x| x.compose(&self.mu)), id.tensor(&self.mu).and_then(|x| x.compose(&self.mu))),
        );
        r.record(
            "unit",
            "defFalg",
            cmp(self.unit.tensor(&id).and_then(|x| x.compose(&self.mu)), Ok(id.clone()))
                .and(cmp(id.tensor(&self.unit).and_then(|x| x.compose(&self.mu)), Ok(id.clone()))),
        );
        r.record(
            "coassociativity",
            "defFalg",
            cmp(self.delta.compose(&self.delta.tensor(&id).unwrap()), self.delta.compose(&id.tensor(&self.delta).unwrap())),
        );
        r.record(
            "counit",
            "defFalg",
            cmp(self.delta.compose(&self.counit.tensor(&id).unwrap()), Ok(id.clone()))
                .and(cmp(self.delta.compose(&id.tensor(&self.counit).unwrap()), Ok(id.clone()))),
        );
        let dm = self.mu.compose(&self.delta);
        r.record(
            "frobenius-compat-left",
            "defFalg",
            cmp(self.delta.tensor(&id).and_then(|x| x.compose(&id.tensor(&self.mu)?)), dm.clone()),
        );
        r.record(
            "frobenius-compat-right",
            "defFalg",
            cmp(id.tensor(&self.delta).and_then(|x| x.compose(&self.mu.tensor(&id)?)), dm),
        );
        r
    }

    /// (a⊗1)·g = g·(1⊗a) for every basis a.
    pub fn check_metric_central(&self) -> Result<(), String> {
        let d = self.dim() as Index;
        let g = self.metric.as_element();
        for a in 0..self.dim() {
            let av = self.basis(a);
            let mut lhs = Accum::new();
            let mut rhs = Accum::new();
            for (i, c) in g.iter() {
                let (x, y) = (Vector::basis(i / d, c.clone()), Vector::basis(i % d, self.space.one()));
                lhs.add_scaled(&self.mul(&av, &x).tensor(&y, d), &self.space.one());
                rhs.add_scaled(&x.tensor(&self.mul(&y, &av), d), &self.space.one());
            }
            let (l, r) = (lhs.finish(), rhs.finish());
            if l != r {
                return Err(format!("at {}: {} ≠ {}", self.space.label(a), l.render(&self.space, 2), r.render(&self.space, 2)));
            }
        }
        Ok(())
    }

    /// Central, and α*α = αα* = 1.
    pub fn is_phase(&self, star: &AntiLinear, alpha: &Vector) -> bool {
        let central = (0..self.dim()).all(|i| {
            let b = self.basis(i);
            self.mul(alpha, &b) == self.mul(&b, alpha)
        });
        let a_star = star.apply(alpha);
        central && &self.mul(&a_star, alpha) == self.one() && &self.mul(alpha, &a_star) == self.one()
    }

    /// The spider with L_α applied on a single input or output leg.
    pub fn phase_on_leg(&self, m: usize, n: usize, leg: Leg, alpha: &Vector) -> TensorMap {
        let s = &self.space;
        let plain = self.spider(m, n, None);
        let l = self.left_mul(alpha);
        let layer = |w: usize, k: usize| {
            let mut t = TensorMap::identity(s, k);
            t = t.tensor(&l).expect("arity");
            t.tensor(&TensorMap::identity(s, w - k - 1)).expect("arity")
        };
        match leg {
            Leg::Input(k) => layer(m, k).compose(&plain).expect("arity"),
            Leg::Output(k) => plain.compose(&layer(n, k)).expect("arity"),
        }
    }

    /// Phase slides: every leg placement gives the same tensor as the phased spider.
    pub fn check_phase_legs(&self, m: usize, n: usize, alpha: &Vector) -> Report {
        let mut r = Report::new();
        let target = self.spider(m, n, Some(alpha));
        let legs = (0..m).map(Leg::Input).chain((0..n).map(Leg::Output));
        for leg in legs {
            let got = self.phase_on_leg(m, n, leg, alpha);
            r.record(format!("phase-leg-{leg}"), "phase-slide", got.diff(&target).map_or(Ok(()), Err));
        }
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    Input(usize),
    Output(usize),
}

impl std::fmt::Display for Leg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Leg::Input(k) => write!(f, "in{k}"),
            Leg::Output(k) => write!(f, "out{k}"),
        }
    }
}

/// Generators of planar terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Mul,
    Comul,
    Unit,
    Counit,
}

impl Node {
    fn arity(self) -> (usize, usize) {
        match self {
            Node::Mul => (2, 1),
            Node::Comul => (1, 2),
            Node::Unit => (0, 1),
            Node::Counit => (1, 0),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Node::Mul => "μ",
            Node::Comul => "Δ",
            Node::Unit => "η",
            Node::Counit => "ε",
        }
    }
}

/// A planar term as a sequence of slices: (generator, leftmost wire it acts on).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarTerm {
    pub inputs: usize,
    pub slices: Vec<(Node, usize)>,
}

impl std::fmt::Display for PlanarTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "in={}", self.inputs)?;
        for (n, p) in &self.slices {
            write!(f, " {}@{}", n.symbol(), p)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationBounds {
    pub max_nodes: usize,
    pub max_inputs: usize,
    pub max_wires: usize,
}

impl Default for EnumerationBounds {
    fn default() -> Self {
        EnumerationBounds { max_nodes: 6, max_inputs: 3, max_wires: 4 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SpiderSummary {
    pub terms: usize,
    pub failures: Vec<String>,
    /// Largest loop count seen, with its scalar λ^k.
    pub max_loops: usize,
}

struct Search<'a> {
    f: &'a FrobeniusAlgebra,
    lambda: CycScalar,
    bounds: EnumerationBounds,
    spiders: std::collections::HashMap<(usize, usize), TensorMap>,
    summary: SpiderSummary,
}

struct State {
    inputs: usize,
    slices: Vec<(Node, usize)>,
    // component id per live wire
    wires: Vec<usize>,
    parent: Vec<usize>,
    loops: usize,
    // images of input basis tensors
    cols: Vec<Vector>,
}

fn find(parent: &[usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

impl Search<'_> {
    fn spider(&mut self, m: usize, n: usize) -> &TensorMap {
        let f = self.f;
        self.spiders.entry((m, n)).or_insert_with(|| f.spider(m, n, None))
    }

    fn visit(&mut self, st: &mut State) {
        if !st.slices.is_empty() || st.inputs > 0 {
            let roots: std::collections::BTreeSet<usize> = (0..st.parent.len()).map(|c| find(&st.parent, c)).collect();
            if roots.len() == 1 {
                self.compare(st);
            }
        }
        if st.slices.len() == self.bounds.max_nodes {
            return;
        }
        let w = st.wires.len();
        for node in [Node::Mul, Node::Comul, Node::Unit, Node::Counit] {
            let (k_in, k_out) = node.arity();
            if k_in > w || w - k_in + k_out > self.bounds.max_wires {
                continue;
            }
            for p in 0..=(w - k_in) {
                if let Some((_, q)) = st.slices.last() {
                    // interchange normal form: never place a slice strictly left of the previous one's outputs
                    if p + k_in <= *q && !(k_in == 0 && p == *q) {
                        continue;
                    }
                }
                self.step(st, node, p);
            }
        }
    }

    fn step(&mut self, st: &mut State, node: Node, p: usize) {
        let s = &self.f.space;
        let saved_wires = st.wires.clone();
        let saved_parent = st.parent.clone();
        let saved_loops = st.loops;
        let w = st.wires.len();
        match node {
            Node::Mul => {
                let (a, b) = (find(&st.parent, st.wires[p]), find(&st.parent, st.wires[p + 1]));
                if a == b {
                    st.loops += 1;
                } else {
                    st.parent[b] = a;
                }
                st.wires.splice(p..p + 2, [a]);
            }
            Node::Comul => {
                let c = st.wires[p];
                st.wires.splice(p..p + 1, [c, c]);
            }
            Node::Unit => {
                let c = st.parent.len();
                st.parent.push(c);
                st.wires.insert(p, c);
            }
            Node::Counit => {
                st.wires.remove(p);
            }
        }
        // a closed component can never reconnect
        let live: std::collections::BTreeSet<usize> = st.wires.iter().map(|c| find(&st.parent, *c)).collect();
        let all: std::collections::BTreeSet<usize> = (0..st.parent.len()).map(|c| find(&st.parent, c)).collect();
        let dead = all.len() > 1 && all.iter().any(|c| !live.contains(c));
        if !dead {
            let map = match node {
                Node::Mul => &self.f.mu,
                Node::Comul => &self.f.delta,
                Node::Unit => &self.f.unit,
                Node::Counit => &self.f.counit,
            };
            let (k_in, _) = node.arity();
            let mut parts: Vec<Part<'_>> = Vec::new();
            if p > 0 {
                parts.push(Part::Id(p));
            }
            parts.push(Part::Map(map));
            if w - p - k_in > 0 {
                parts.push(Part::Id(w - p - k_in));
            }
            let new_cols: Vec<Vector> = st.cols.iter().map(|v| apply_layer(s, v, &parts)).collect();
            let old_cols = std::mem::replace(&mut st.cols, new_cols);
            st.slices.push((node, p));
            self.visit(st);
            st.slices.pop();
            st.cols = old_cols;
        }
        st.wires = saved_wires;
        st.parent = saved_parent;
        st.loops = saved_loops;
    }

    fn compare(&mut self, st: &State) {
        let (m, n) = (st.inputs, st.wires.len());
        let lambda_k = self.lambda.pow(st.loops as i64).expect("nonzero λ");
        let loops = st.loops;
        let sp = self.spider(m, n).clone();
        self.summary.terms += 1;
        self.summary.max_loops = self.summary.max_loops.max(loops);
        for (j, col) in st.cols.iter().enumerate() {
            let want = sp.column(j as Index).scale(&lambda_k);
            if col != &want {
                let term = PlanarTerm { inputs: m, slices: st.slices.clone() };
                self.summary.failures.push(format!("{term}: differs from λ^{loops}·spider({m},{n}) at input {j}"));
                return;
            }
        }
    }
}

/// Enumerates connected planar terms in {μ, Δ, η, ε} and compares each with
/// λ^{loops} times the spider of its arity.
pub fn enumerate_spider_terms(f: &FrobeniusAlgebra, bounds: EnumerationBounds) -> Result<SpiderSummary, String> {
    let lambda = f.loop_scalar().ok_or("F-algebra is neither special nor quasispecial")?;
    let mut search = Search { f, lambda, bounds, spiders: Default::default(), summary: SpiderSummary::default() };
    for m in 0..=bounds.max_inputs {
        let cols = (0..f.space.power(m)).map(|j| Vector::basis(j, f.space.one())).collect();
        let mut st = State { inputs: m, slices: Vec::new(), wires: (0..m).collect(), parent: (0..m).collect(), loops: 0, cols };
        search.visit(&mut st);
    }
    Ok(search.summary)
}

pub fn check_spider_theorem(f: &FrobeniusAlgebra, bounds: EnumerationBounds) -> Report {
    let mut r = Report::new();
    match enumerate_spider_terms(f, bounds) {
        Ok(s) => {
            if s.failures.is_empty() {
                r.pass_with("spider-theorem", "spider", format!("{} terms, up to {} loops", s.terms, s.max_loops));
            } else {
                r.record("spider-theorem", "spider", Err(format!("{} of {} terms: {}", s.failures.len(), s.terms, s.failures[0])));
            }
        }
        Err(e) => r.record("spider-theorem", "spider", Err(e)),
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn kz2_red() -> FrobeniusAlgebra {
        let m = models::build("kX:Z2").unwrap();
        let form = m.integrals.integral.clone();
        let form = m.hopf.mu.compose(&form).unwrap();
        FrobeniusAlgebra::from_form(&m.hopf.mu, &m.hopf.unit, &form).unwrap()
    }

    #[test]
    fn one_dimensional() {
        let s = Space::new(1, vec!["1".into()]).unwrap();
        let one = Vector::basis(0, s.one());
        let mu = TensorMap::from_fn(&s, 2, 1, |_| one.clone());
        let unit = TensorMap::element(&s, 1, one.clone());
        let form = TensorMap::functional(&s, 2, &one);
        let f = FrobeniusAlgebra::from_form(&mu, &unit, &form).unwrap();
        assert_eq!(f.delta.column(0), &one);
        assert!(f.check().all_passed());
        assert_eq!(f.classify(), Speciality::Special);
    }

    #[test]
    fn red_kz2_quasispecial() {
        let f = kz2_red();
        assert!(f.check().all_passed(), "{:?}", f.check());
        assert_eq!(f.classify(), Speciality::Quasispecial(CycScalar::from_int(2, 2)));
        let md = f.delta.compose(&f.mu).unwrap();
        assert_eq!(md, TensorMap::identity(&f.space, 1).scale(&CycScalar::from_int(2, 2)));
    }

    #[test]
    fn degenerate_form_rejected() {
        let m = models::build("kX:Z2").unwrap();
        let zero = TensorMap::zero(&m.hopf.space, 2, 0);
        assert!(FrobeniusAlgebra::from_form(&m.hopf.mu, &m.hopf.unit, &zero).is_err());
    }

    #[test]
    fn spider_terms_red_kz2() {
        let f = kz2_red();
        let b = EnumerationBounds { max_nodes: 4, max_inputs: 2, max_wires: 3 };
        let s = enumerate_spider_terms(&f, b).unwrap();
        assert!(s.failures.is_empty(), "{:?}", &s.failures[..s.failures.len().min(3)]);
        assert!(s.terms > 20 && s.max_loops >= 1);
    }

    #[test]
    fn group_elements_are_phases() {
        let m = models::build("kX:Z3").unwrap();
        let form = m.hopf.mu.compose(&m.integrals.integral).unwrap();
        let f = FrobeniusAlgebra::from_form(&m.hopf.mu, &m.hopf.unit, &form).unwrap();
        let star = m.star.unwrap();
        for i in 0..3 {
            let x = f.basis(i);
            assert!(f.is_phase(&star, &x));
            assert!(f.check_phase_legs(2, 2, &x).all_passed());
        }
        let not_unitary = f.basis(0).add(&f.basis(1));
        assert!(!f.is_phase(&star, &not_unitary));
    }
}
