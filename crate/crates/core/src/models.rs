//! Concrete Hopf algebras: group and function algebras, the Taft algebra,
//! reduced u_q(sl2) and the braided line, plus the PBW normal-ordering engine.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::hopf::{mul_tensor_with, HopfData, HopfError, Integrals};
use crate::scalar::{qfact, CycScalar};
use crate::tensor::{Accum, AntiLinear, Index, Space, TensorMap, Vector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown model id {id:?}{}", suggestion_suffix(.suggestion))]
    UnknownModel { id: String, suggestion: Option<String> },
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("unknown generator symbol {0:?}")]
    UnknownGenerator(String),
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Hopf(#[from] HopfError),
}

fn suggestion_suffix(s: &Option<String>) -> String {
    s.as_ref().map(|x| format!(" (did you mean {x:?}?)")).unwrap_or_default()
}

/// A finite group by Cayley table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    pub names: Vec<String>,
    /// table[x][y] = xy
    pub table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    pub identity: usize,
}

impl GroupTable {
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<GroupTable, ModelError> {
        let n = names.len();
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|x| *x >= n)) {
            return Err(ModelError::InvalidGroup("table must be a square array of element indices".into()));
        }
        let identity = (0..n)
            .find(|e| (0..n).all(|x| table[*e][x] == x && table[x][*e] == x))
            .ok_or_else(|| ModelError::InvalidGroup("no identity element".into()))?;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(ModelError::InvalidGroup(format!(
                            "not associative at ({}, {}, {})",
                            names[x], names[y], names[z]
                        )));
                    }
                }
            }
        }
        let mut inverse = Vec::with_capacity(n);
        for x in 0..n {
            let inv = (0..n)
                .find(|y| table[x][*y] == identity && table[*y][x] == identity)
                .ok_or_else(|| ModelError::InvalidGroup(format!("{} has no inverse", names[x])))?;
            inverse.push(inv);
        }
        Ok(GroupTable { names, table, inverse, identity })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    /// ℤ_n with elements e, g, g^2, …
    pub fn cyclic(n: usize) -> GroupTable {
        let names = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            })
            .collect();
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        GroupTable::new(names, table).expect("cyclic group")
    }

    /// S₃ as permutations of {1,2,3}; (xy)(i) = x(y(i)).
    pub fn s3() -> GroupTable {
        let perms: [([usize; 3], &str); 6] = [
            ([0, 1, 2], "e"),
            ([1, 0, 2], "(12)"),
            ([2, 1, 0], "(13)"),
            ([0, 2, 1], "(23)"),
            ([1, 2, 0], "(123)"),
            ([2, 0, 1], "(132)"),
        ];
        let idx = |p: [usize; 3]| perms.iter().position(|q| q.0 == p).unwrap();
        let table = perms
            .iter()
            .map(|(x, _)| perms.iter().map(|(y, _)| idx([x[y[0]], x[y[1]], x[y[2]]])).collect())
            .collect();
        GroupTable::new(perms.iter().map(|p| p.1.to_string()).collect(), table).expect("S3")
    }
}

/// Generator images and PBW words, used to extend maps multiplicatively.
#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    pub generators: Vec<(String, Vector)>,
    /// For each basis element, the generator indices whose product it is.
    pub words: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Group(GroupTable),
    Function(GroupTable),
    Taft(u32),
    Uqsl2(u32),
    BraidedLine(u32),
}

/// A constructed model with its normalised integrals (∫Λ = 1) and *-structure.
#[derive(Clone, Debug)]
pub struct Model {
    pub id: String,
    pub kind: ModelKind,
    pub hopf: HopfData,
    pub integrals: Integrals,
    pub star: Option<AntiLinear>,
    pub presentation: Presentation,
}

impl Model {
    pub fn order(&self) -> u32 {
        self.hopf.order()
    }

    /// Basis vector by label.
    pub fn element(&self, label: &str) -> Option<Vector> {
        self.hopf.space.index_of(label).map(|i| self.hopf.basis(i))
    }

    pub fn generator(&self, name: &str) -> Option<&Vector> {
        self.presentation.generators.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

fn element_map(space: &Arc<Space>, images: impl Fn(usize) -> Vector) -> TensorMap {
    TensorMap::from_fn(space, 1, 1, |j| images(j as usize))
}

fn unit_at(space: &Arc<Space>, i: usize) -> TensorMap {
    TensorMap::element(space, 1, Vector::basis(i as Index, space.one()))
}

/// Group algebra kX: Δx = x⊗x, Sx = x⁻¹, ∫x = δ_{x,e}, Λ = Σx.
pub fn group_algebra(g: &GroupTable, order: u32) -> Result<Model, ModelError> {
    let n = g.order();
    let space = Space::new(order, g.names.clone()).map_err(HopfError::from)?;
    let one = space.one();
    let b = |i: usize| Vector::basis(i as Index, one.clone());
    let mu = TensorMap::from_fn(&space, 2, 1, |j| b(g.mul(j as usize / n, j as usize % n)));
    let delta = TensorMap::from_fn(&space, 1, 2, |j| Vector::basis(j * n as Index + j, one.clone()));
    let counit = TensorMap::from_fn(&space, 1, 0, |_| Vector::basis(0, one.clone()));
    let antipode = element_map(&space, |j| b(g.inverse[j]));
    let mut hopf = HopfData::new(
        format!("k[{}]", g.names.join(",")),
        space.clone(),
        mu,
        unit_at(&space, g.identity),
        delta,
        counit,
        antipode.clone(),
        Some(antipode),
    )?;
    hopf.rmatrix = Some(Vector::basis((g.identity * n + g.identity) as Index, one.clone()));
    let integrals = Integrals {
        integral: TensorMap::functional(&space, 1, &b(g.identity)),
        lambda: TensorMap::element(&space, 1, Vector::from_terms((0..n).map(|i| (i as Index, one.clone())))),
    };
    let star = AntiLinear(element_map(&space, |j| b(g.inverse[j])));
    let presentation = Presentation {
        generators: (0..n).map(|i| (g.names[i].clone(), b(i))).collect(),
        words: (0..n).map(|i| if i == g.identity { vec![] } else { vec![i] }).collect(),
    };
    Ok(Model { id: String::new(), kind: ModelKind::Group(g.clone()), hopf, integrals, star: Some(star), presentation })
}

/// Function algebra k(X) in the δ basis: Δδ_x = Σ_{yz=x} δ_y⊗δ_z.
pub fn function_algebra(g: &GroupTable, order: u32) -> Result<Model, ModelError> {
    let n = g.order();
    let labels = g.names.iter().map(|x| format!("δ_{x}")).collect();
    let space = Space::new(order, labels).map_err(HopfError::from)?;
    let one = space.one();
    let b = |i: usize| Vector::basis(i as Index, one.clone());
    let all = Vector::from_terms((0..n).map(|i| (i as Index, one.clone())));
    let mu = TensorMap::from_fn(&space, 2, 1, |j| {
        let (x, y) = (j as usize / n, j as usize % n);
        if x == y {
            b(x)
        } else {
            Vector::zero()
        }
    });
    let delta = TensorMap::from_fn(&space, 1, 2, |x| {
        Vector::from_terms(
            (0..n).flat_map(|y| (0..n).map(move |z| (y, z))).filter(|(y, z)| g.mul(*y, *z) == x as usize).map(|(y, z)| ((y * n + z) as Index, one.clone())),
        )
    });
    let counit = TensorMap::from_fn(&space, 1, 0, |x| {
        if x as usize == g.identity {
            Vector::basis(0, one.clone())
        } else {
            Vector::zero()
        }
    });
    let antipode = element_map(&space, |j| b(g.inverse[j]));
    let hopf = HopfData::new(
        format!("k({})", g.names.join(",")),
        space.clone(),
        mu,
        TensorMap::element(&space, 1, all.clone()),
        delta,
        counit,
        antipode.clone(),
        Some(antipode),
    )?;
    let integrals = Integrals {
        integral: TensorMap::functional(&space, 1, &all),
        lambda: TensorMap::element(&space, 1, b(g.identity)),
    };
    let star = AntiLinear(element_map(&space, |j| b(g.inverse[j])));
    let presentation = Presentation {
        generators: (0..n).map(|i| (format!("δ_{}", g.names[i]), b(i))).collect(),
        words: (0..n).map(|i| vec![i]).collect(),
    };
    Ok(Model { id: String::new(), kind: ModelKind::Function(g.clone()), hopf, integrals, star: Some(star), presentation })
}

/// Generator letters of the quantum-group presentations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    K,
    KInv,
    F,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// u_q(b+): generated by K, F.
    Taft,
    /// reduced u_q(sl2): K, F, E (q = −1 uses the dedicated n = 2 relations).
    Uqsl2,
}

/// Which rewrite site is reduced first; all strategies must agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Parses words such as "E K^-1 F^2" or "EKF".
pub fn parse_word(text: &str) -> Result<Vec<Letter>, ModelError> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let g = match chars[i] {
            'K' => Letter::K,
            'E' => Letter::E,
            'F' => Letter::F,
            '1' => {
                i += 1;
                continue;
            }
            c => return Err(ModelError::UnknownGenerator(c.to_string())),
        };
        i += 1;
        let mut power: i64 = 1;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let braced = i < chars.len() && chars[i] == '{';
            if braced {
                i += 1;
            }
            let start = i;
            if i < chars.len() && chars[i] == '-' {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            power = s.parse().map_err(|_| ModelError::UnknownGenerator(format!("{g:?}^{s}")))?;
            if braced {
                if i < chars.len() && chars[i] == '}' {
                    i += 1;
                } else {
                    return Err(ModelError::UnknownGenerator("unclosed brace".into()));
                }
            }
        }
        if power < 0 && g != Letter::K {
            return Err(ModelError::UnknownGenerator(format!("{g:?}^{power}")));
        }
        if power.unsigned_abs() > 64 {
            return Err(ModelError::Unsupported(format!("exponent {power}")));
        }
        let letter = if power < 0 { Letter::KInv } else { g };
        out.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
    }
    Ok(out)
}

// letters after K⁻¹ elimination: K < F < E is the PBW order
const LK: u8 = 0;
const LF: u8 = 1;
const LE: u8 = 2;

enum Site {
    Run(usize, u8),
    Swap(usize),
}

/// The PBW rewriting system for one presentation.
#[derive(Clone, Debug)]
pub struct NormalOrder {
    n: u32,
    family: Family,
}

impl NormalOrder {
    pub fn new(n: u32, family: Family) -> Result<NormalOrder, ModelError> {
        if n < 2 {
            return Err(ModelError::Unsupported(format!("root of unity order {n} (need n ≥ 2)")));
        }
        Ok(NormalOrder { n, family })
    }

    pub fn dim(&self) -> usize {
        let n = self.n as usize;
        match self.family {
            Family::Taft => n * n,
            Family::Uqsl2 => n * n * n,
        }
    }

    fn find_site(&self, w: &[u8], strategy: Strategy) -> Option<Site> {
        let n = self.n as usize;
        let at = |p: usize| -> Option<Site> {
            if p + n <= w.len() && w[p..p + n].iter().all(|x| *x == w[p]) {
                return Some(Site::Run(p, w[p]));
            }
            if p + 1 < w.len() && w[p] > w[p + 1] {
                return Some(Site::Swap(p));
            }
            None
        };
        match strategy {
            Strategy::Leftmost => (0..w.len()).find_map(at),
            Strategy::Rightmost => (0..w.len()).rev().find_map(at),
        }
    }

    /// Rewrites a word to a combination of PBW monomials.
    pub fn normal_order(&self, word: &[Letter], strategy: Strategy) -> Result<Vector, ModelError> {
        let n = self.n;
        let mut w = Vec::with_capacity(word.len());
        for l in word {
            match l {
                Letter::K => w.push(LK),
                Letter::KInv => w.extend(std::iter::repeat_n(LK, n as usize - 1)),
                Letter::F => w.push(LF),
                Letter::E if self.family == Family::Uqsl2 => w.push(LE),
                Letter::E => return Err(ModelError::UnknownGenerator("E".into())),
            }
        }
        let q = CycScalar::q(n);
        let qi = CycScalar::q_pow(n, -1);
        let kappa = if n > 2 { Some((&q - &qi).inv().expect("q ≠ q⁻¹")) } else { None };
        let mut pending: BTreeMap<Vec<u8>, CycScalar> = BTreeMap::new();
        pending.insert(w, CycScalar::one(n));
        let mut done = Accum::new();
        let push = |m: &mut BTreeMap<Vec<u8>, CycScalar>, w: Vec<u8>, c: CycScalar| {
            if c.is_zero() {
                return;
            }
            let e = m.entry(w).or_insert_with(|| CycScalar::zero(n));
            *e += &c;
        };
        while let Some((w, c)) = pending.pop_first() {
            if c.is_zero() {
                continue;
            }
            match self.find_site(&w, strategy) {
                None => done.push(self.index_of_sorted(&w) as Index, c),
                Some(Site::Run(p, g)) => {
                    if g == LK {
                        let mut v = w[..p].to_vec();
                        v.extend_from_slice(&w[p + n as usize..]);
                        push(&mut pending, v, c);
                    }
                }
                Some(Site::Swap(p)) => {
                    let (a, b) = (w[p], w[p + 1]);
                    let mut v = w.clone();
                    v.swap(p, p + 1);
                    match (a, b) {
                        (LE, LK) => push(&mut pending, v, &c * &q),
                        (LF, LK) => push(&mut pending, v, &c * &qi),
                        (LE, LF) => {
                            push(&mut pending, v, c.clone());
                            if let Some(k) = &kappa {
                                let ck = &c * k;
                                let mut plus = w[..p].to_vec();
                                plus.push(LK);
                                plus.extend_from_slice(&w[p + 2..]);
                                push(&mut pending, plus, ck.clone());
                                let mut minus = w[..p].to_vec();
                                minus.extend(std::iter::repeat_n(LK, n as usize - 1));
                                minus.extend_from_slice(&w[p + 2..]);
                                push(&mut pending, minus, -ck);
                            }
                        }
                        _ => unreachable!("only descending pairs are rewrite sites"),
                    }
                }
            }
        }
        Ok(done.finish())
    }

    fn index_of_sorted(&self, w: &[u8]) -> usize {
        let n = self.n as usize;
        let count = |g: u8| w.iter().filter(|x| **x == g).count();
        let (i, j, k) = (count(LK), count(LF), count(LE));
        debug_assert!(i < n && j < n && k < n);
        match self.family {
            Family::Taft => i * n + j,
            Family::Uqsl2 => (i * n + j) * n + k,
        }
    }

    /// Exponents (i, j, k) of the PBW monomial K^i F^j E^k with index `idx`.
    pub fn exponents(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n as usize;
        match self.family {
            Family::Taft => (idx / n, idx % n, 0),
            Family::Uqsl2 => (idx / (n * n), (idx / n) % n, idx % n),
        }
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.n as usize;
        match self.family {
            Family::Taft => (i % n) * n + j,
            Family::Uqsl2 => ((i % n) * n + j) * n + k,
        }
    }

    pub fn label(&self, idx: usize) -> String {
        let (i, j, k) = self.exponents(idx);
        match self.family {
            Family::Taft => format!("K^{i} F^{j}"),
            Family::Uqsl2 => format!("K^{i} F^{j} E^{k}"),
        }
    }

    pub fn word(&self, idx: usize) -> Vec<Letter> {
        let (i, j, k) = self.exponents(idx);
        let mut w = vec![Letter::K; i];
        w.extend(std::iter::repeat_n(Letter::F, j));
        w.extend(std::iter::repeat_n(Letter::E, k));
        w
    }
}

fn letter_index(l: Letter) -> usize {
    match l {
        Letter::K | Letter::KInv => 0,
        Letter::F => 1,
        Letter::E => 2,
    }
}

/// Builds Taft or u_q(sl2) from the rewriting system.
fn quantum_group(n: u32, family: Family) -> Result<Model, ModelError> {
    let no = NormalOrder::new(n, family)?;
    let d = no.dim();
    let labels = (0..d).map(|i| no.label(i)).collect();
    let space = Space::new(n, labels).map_err(HopfError::from)?;
    let one = space.one();
    let q = CycScalar::q(n);
    let qi = CycScalar::q_pow(n, -1);
    let b = |i: usize| Vector::basis(i as Index, one.clone());

    // left multiplication by each generator
    let gens: Vec<Letter> = match family {
        Family::Taft => vec![Letter::K, Letter::F],
        Family::Uqsl2 => vec![Letter::K, Letter::F, Letter::E],
    };
    let mut left = Vec::new();
    for g in &gens {
        let cols: Vec<Vector> = (0..d)
            .map(|j| {
                let mut w = vec![*g];
                w.extend(no.word(j));
                no.normal_order(&w, Strategy::Leftmost)
            })
            .collect::<Result<_, _>>()?;
        left.push(TensorMap::from_columns(&space, 1, 1, cols).map_err(HopfError::from)?);
    }
    let mul_word = |word: &[Letter], v: &Vector| -> Vector {
        word.iter().rev().fold(v.clone(), |acc, l| left[letter_index(*l)].apply(&acc))
    };
    let mu = TensorMap::from_fn(&space, 2, 1, |j| mul_word(&no.word(j as usize / d), &b(j as usize % d)));
    let mul = |a: &Vector, c: &Vector| -> Vector {
        let mut acc = Accum::new();
        for (i, x) in a.iter() {
            for (j, y) in c.iter() {
                acc.add_scaled(mu.column(*i * d as Index + j), &(x * y));
            }
        }
        acc.finish()
    };

    let k_idx = no.index(1, 0, 0);
    let f_idx = no.index(0, 1, 0);
    let e_idx = if family == Family::Uqsl2 { no.index(0, 0, 1) } else { 0 };
    let k_inv = b(no.index(n as usize - 1, 0, 0));
    let kk = b(k_idx);
    let ff = b(f_idx);
    let ee = b(e_idx);
    let dd = d as Index;
    let t2 = |x: &Vector, y: &Vector| x.tensor(y, dd);
    let unit = b(0);

    // generator coproducts and antipodes
    let delta_k = t2(&kk, &kk);
    let (delta_f, delta_e, s_k, s_f, s_e);
    if n == 2 && family == Family::Uqsl2 {
        delta_e = t2(&ee, &kk).add(&t2(&unit, &ee));
        delta_f = t2(&ff, &unit).add(&t2(&kk, &ff));
        s_k = kk.clone();
        s_e = mul(&kk, &ee);
        s_f = mul(&kk, &ff).neg();
    } else {
        delta_e = t2(&unit, &ee).add(&t2(&ee, &kk));
        delta_f = t2(&ff, &unit).add(&t2(&k_inv, &ff));
        s_k = k_inv.clone();
        s_e = mul(&ee, &k_inv).neg();
        s_f = mul(&kk, &ff).neg();
    }
    let gen_delta = [delta_k, delta_f, delta_e];
    let gen_s = [s_k, s_f, s_e];
    let unit2 = t2(&unit, &unit);
    let delta = TensorMap::from_fn(&space, 1, 2, |j| {
        no.word(j as usize).iter().fold(unit2.clone(), |acc, l| mul_tensor_with(&mu, &acc, &gen_delta[letter_index(*l)], 2))
    });
    let antipode = TensorMap::from_fn(&space, 1, 1, |j| {
        no.word(j as usize).iter().fold(unit.clone(), |acc, l| mul(&gen_s[letter_index(*l)], &acc))
    });
    let counit = TensorMap::from_fn(&space, 1, 0, |j| {
        let (_, f, e) = no.exponents(j as usize);
        if f == 0 && e == 0 {
            Vector::basis(0, one.clone())
        } else {
            Vector::zero()
        }
    });
    let name = match family {
        Family::Taft => format!("u_q(b+) n={n}"),
        Family::Uqsl2 => format!("u_q(sl2) n={n}"),
    };
    let mut hopf = HopfData::new(name, space.clone(), mu.clone(), TensorMap::element(&space, 1, unit.clone()), delta, counit, antipode, None)?;

    let nn = n as usize;
    let lambda_k = Vector::from_terms((0..nn).map(|r| (no.index(r, 0, 0) as Index, one.clone())));
    let (integral, lambda) = match family {
        Family::Taft => (b(no.index(0, nn - 1, 0)), mul(&lambda_k, &b(no.index(0, nn - 1, 0)))),
        Family::Uqsl2 => (b(no.index(1, nn - 1, nn - 1)), mul(&lambda_k, &b(no.index(0, nn - 1, nn - 1)))),
    };
    let integrals =
        Integrals { integral: TensorMap::functional(&space, 1, &integral), lambda: TensorMap::element(&space, 1, lambda) };

    let mut star = None;
    if family == Family::Uqsl2 {
        let rm = if n == 2 {
            let half = CycScalar::from_ratio(2, 1, 2);
            let rk = t2(&unit, &unit).add(&t2(&kk, &unit)).add(&t2(&unit, &kk)).sub(&t2(&kk, &kk)).scale(&half);
            let left_factor = t2(&unit, &unit).sub(&t2(&ff, &ee));
            mul_tensor_with(&mu, &left_factor, &rk, 2)
        } else {
            let mut acc = Accum::new();
            let qq = &q - &qi;
            let inv_n = CycScalar::from_ratio(n, 1, n as i64);
            for r in 0..nn {
                let fact_conj = qfact(n, r as u32).conj();
                let coeff_r = &(&inv_n * &qq.pow(r as i64).expect("power")) * &fact_conj.inv().expect("nonzero factorial");
                let coeff_r = if r % 2 == 1 { -coeff_r } else { coeff_r };
                let fr = b(no.index(0, r, 0));
                let er = b(no.index(0, 0, r));
                for a in 0..nn {
                    let left_el = mul(&fr, &b(no.index(a, 0, 0)));
                    for bb in 0..nn {
                        let right_el = mul(&er, &b(no.index(bb, 0, 0)));
                        let c = &coeff_r * &CycScalar::q_pow(n, -((a * bb) as i64));
                        acc.add_scaled(&t2(&left_el, &right_el), &c);
                    }
                }
            }
            acc.finish()
        };
        hopf.rmatrix = Some(rm);

        let k_star = if n == 2 { kk.clone() } else { k_inv.clone() };
        let star_map = TensorMap::from_fn(&space, 1, 1, |j| {
            let (i, f, e) = no.exponents(j as usize);
            // (K^i F^f E^e)* = (E*)^e (F*)^f (K*)^i = F^e E^f (K*)^i
            let mut acc = b(no.index(0, e, 0));
            for _ in 0..f {
                acc = mul(&acc, &ee);
            }
            for _ in 0..i {
                acc = mul(&acc, &k_star);
            }
            acc
        });
        star = Some(AntiLinear(star_map));
    }
    let presentation = Presentation {
        generators: gens
            .iter()
            .map(|g| match g {
                Letter::K => ("K".to_string(), kk.clone()),
                Letter::F => ("F".to_string(), ff.clone()),
                _ => ("E".to_string(), ee.clone()),
            })
            .collect(),
        words: (0..d).map(|j| no.word(j).iter().map(|l| letter_index(*l)).collect()).collect(),
    };
    let kind = match family {
        Family::Taft => ModelKind::Taft(n),
        Family::Uqsl2 => ModelKind::Uqsl2(n),
    };
    Ok(Model { id: String::new(), kind, hopf, integrals, star, presentation })
}

pub fn taft(n: u32) -> Result<Model, ModelError> {
    quantum_group(n, Family::Taft)
}

pub fn uqsl2(n: u32) -> Result<Model, ModelError> {
    quantum_group(n, Family::Uqsl2)
}

/// The braided line k[x]/(x^n) with Ψ(x^i⊗x^j) = q^{ij} x^j⊗x^i.
pub fn braided_line(n: u32) -> Result<Model, ModelError> {
    if n < 2 {
        return Err(ModelError::Unsupported(format!("braided line needs n ≥ 2, got {n}")));
    }
    let nn = n as usize;
    let labels = (0..nn).map(|m| format!("x^{m}")).collect();
    let space = Space::new(n, labels).map_err(HopfError::from)?;
    let one = space.one();
    let b = |i: usize| Vector::basis(i as Index, one.clone());
    let dd = nn as Index;
    let mu = TensorMap::from_fn(&space, 2, 1, |j| {
        let s = j as usize / nn + j as usize % nn;
        if s < nn {
            b(s)
        } else {
            Vector::zero()
        }
    });
    let delta = TensorMap::from_fn(&space, 1, 2, |m| {
        Vector::from_terms(
            (0..=m as usize).map(|r| ((r * nn + (m as usize - r)) as Index, crate::scalar::qbinom(n, m as u32, r as u32))),
        )
    });
    let counit = TensorMap::from_fn(&space, 1, 0, |m| if m == 0 { Vector::basis(0, one.clone()) } else { Vector::zero() });
    let antipode = TensorMap::from_fn(&space, 1, 1, |m| {
        let m = m as i64;
        let sign = if m % 2 == 1 { -one.clone() } else { one.clone() };
        Vector::basis(m as Index, &sign * &CycScalar::q_pow(n, m * (m - 1) / 2))
    });
    let braiding = TensorMap::from_fn(&space, 2, 2, |j| {
        let (i, k) = (j / dd, j % dd);
        Vector::basis(k * dd + i, CycScalar::q_pow(n, (i * k) as i64))
    });
    let mut hopf = HopfData::new(format!("braided line n={n}"), space.clone(), mu, TensorMap::element(&space, 1, b(0)), delta, counit, antipode, None)?;
    hopf.braiding = Some(braiding);
    let integrals =
        Integrals { integral: TensorMap::functional(&space, 1, &b(nn - 1)), lambda: TensorMap::element(&space, 1, b(nn - 1)) };
    let presentation = Presentation {
        generators: vec![("x".into(), b(1))],
        words: (0..nn).map(|m| vec![0; m]).collect(),
    };
    Ok(Model { id: String::new(), kind: ModelKind::BraidedLine(n), hopf, integrals, star: None, presentation })
}

/// Model ids shipped by the registry.
pub const REGISTRY: &[&str] = &[
    "kX:Z2", "kX:Z3", "kX:Z4", "kX:Z8", "kX:S3", "fun:Z2", "fun:S3", "taft:3", "uqsl2:2", "uqsl2:3", "uqsl2:5", "bline:2",
    "bline:3",
];

fn group_by_name(name: &str) -> Option<(GroupTable, u32)> {
    if name == "S3" {
        return Some((GroupTable::s3(), 1));
    }
    let n: usize = name.strip_prefix('Z')?.parse().ok()?;
    if (1..=16).contains(&n) {
        Some((GroupTable::cyclic(n), n as u32))
    } else {
        None
    }
}

/// Builds a model from its registry id (e.g. "uqsl2:3").
pub fn build(id: &str) -> Result<Model, ModelError> {
    let unknown = || ModelError::UnknownModel { id: id.to_string(), suggestion: nearest(id, REGISTRY) };
    let (kind, param) = id.split_once(':').ok_or_else(unknown)?;
    let small = |p: &str| p.parse::<u32>().ok().filter(|n| (2..=7).contains(n));
    let mut model = match kind {
        "kX" => {
            let (g, order) = group_by_name(param).ok_or_else(unknown)?;
            group_algebra(&g, order)?
        }
        "fun" => {
            let (g, order) = group_by_name(param).ok_or_else(unknown)?;
            function_algebra(&g, order)?
        }
        "taft" => taft(small(param).ok_or_else(unknown)?)?,
        "uqsl2" => uqsl2(small(param).ok_or_else(unknown)?)?,
        "bline" => braided_line(small(param).ok_or_else(unknown)?)?,
        _ => return Err(unknown()),
    };
    model.id = id.to_string();
    model.hopf.name = id.to_string();
    Ok(model)
}

/// Closest candidate by edit distance, if reasonably close.
pub fn nearest(id: &str, candidates: &[&str]) -> Option<String> {
    candidates
        .iter()
        .map(|c| (strsim::levenshtein(id, c), *c))
        .min()
        .filter(|(d, c)| *d <= c.len().max(3) / 2 + 1)
        .map(|(_, c)| c.to_string())
}
