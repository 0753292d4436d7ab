//! Finite-dimensional (braided) Hopf algebras as structure tensors, axiom checks
//! and integral solvers.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::report::Report;
use crate::scalar::{CycScalar, ScalarError};
use crate::tensor::{apply_chain, apply_layer, Accum, Index, Part, RowReducer, Space, TensorError, TensorMap, Vector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HopfError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("{what} solution space has dimension {dim}, expected 1")]
    IntegralDimension { what: &'static str, dim: usize },
    #[error("integral pairs to zero with the integral element; cannot normalise")]
    ZeroNormalization,
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("malformed document: {0}")]
    Decode(String),
}

/// A Hopf algebra (or braided Hopf algebra when `braiding` is set).
#[derive(Clone, Debug, PartialEq)]
pub struct HopfData {
    pub name: String,
    pub space: Arc<Space>,
    pub mu: TensorMap,
    pub unit: TensorMap,
    pub delta: TensorMap,
    pub counit: TensorMap,
    pub antipode: TensorMap,
    pub antipode_inv: TensorMap,
    pub braiding: Option<TensorMap>,
    pub rmatrix: Option<Vector>,
}

/// Right-invariant integral functional and left integral element.
#[derive(Clone, Debug, PartialEq)]
pub struct Integrals {
    pub integral: TensorMap,
    pub lambda: TensorMap,
}

impl Integrals {
    pub fn lambda_element(&self) -> &Vector {
        self.lambda.as_element()
    }

    pub fn eval(&self, v: &Vector) -> CycScalar {
        let out = self.integral.apply(v);
        out.coeff(0, self.integral.space().order())
    }
}

pub(crate) fn first_failure(count: Index, mut f: impl FnMut(Index) -> Result<(), String>) -> Result<(), String> {
    for i in 0..count {
        f(i)?;
    }
    Ok(())
}

pub(crate) fn expect_eq(space: &Space, arity: usize, what: &str, lhs: &Vector, rhs: &Vector) -> Result<(), String> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("{what}: {} ≠ {}", lhs.render(space, arity), rhs.render(space, arity)))
    }
}

impl HopfData {
    /// Assembles a Hopf algebra; S⁻¹ is computed by matrix inversion when absent.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        space: Arc<Space>,
        mu: TensorMap,
        unit: TensorMap,
        delta: TensorMap,
        counit: TensorMap,
        antipode: TensorMap,
        antipode_inv: Option<TensorMap>,
    ) -> Result<HopfData, HopfError> {
        let shapes = [
            ("product", mu.arity(), (2, 1)),
            ("unit", unit.arity(), (0, 1)),
            ("coproduct", delta.arity(), (1, 2)),
            ("counit", counit.arity(), (1, 0)),
            ("antipode", antipode.arity(), (1, 1)),
        ];
        for (what, got, want) in shapes {
            if got != want {
                return Err(HopfError::Invalid(format!("{what} has arity {got:?}, expected {want:?}")));
            }
        }
        let antipode_inv = match antipode_inv {
            Some(s) => s,
            None => antipode.invert()?,
        };
        Ok(HopfData {
            name: name.into(),
            space,
            mu,
            unit,
            delta,
            counit,
            antipode,
            antipode_inv,
            braiding: None,
            rmatrix: None,
        })
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

    pub fn mul_basis(&self, i: usize, j: usize) -> &Vector {
        self.mu.column((i * self.dim() + j) as Index)
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        let d = self.dim() as Index;
        let mut acc = Accum::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                acc.add_scaled(self.mu.column(i * d + j), &(x * y));
            }
        }
        acc.finish()
    }

    /// Product in the algebra H^{⊗k} (factorwise).
    pub fn mul_tensor(&self, x: &Vector, y: &Vector, k: usize) -> Vector {
        mul_tensor_with(&self.mu, x, y, k)
    }

    pub fn coproduct(&self, a: &Vector) -> Vector {
        self.delta.apply(a)
    }

    pub fn eps(&self, a: &Vector) -> CycScalar {
        self.counit.apply(a).coeff(0, self.order())
    }

    pub fn s(&self, a: &Vector) -> Vector {
        self.antipode.apply(a)
    }

    pub fn s_inv(&self, a: &Vector) -> Vector {
        self.antipode_inv.apply(a)
    }

    pub fn flip(&self) -> TensorMap {
        TensorMap::flip(&self.space, 2, 0).expect("two wires")
    }

    /// Ψ if present, the plain flip otherwise.
    pub fn psi(&self) -> Cow<'_, TensorMap> {
        match &self.braiding {
            Some(b) => Cow::Borrowed(b),
            None => Cow::Owned(self.flip()),
        }
    }

    pub fn is_braided(&self) -> bool {
        self.braiding.is_some()
    }

    /// Applies a (1,1) map to leg `leg` of an element of H^{⊗k}.
    pub fn on_leg(&self, map: &TensorMap, v: &Vector, leg: usize, k: usize) -> Vector {
        let mut parts: SmallVec<[Part<'_>; 4]> = SmallVec::new();
        if leg > 0 {
            parts.push(Part::Id(leg));
        }
        parts.push(Part::Map(map));
        if leg + 1 < k {
            parts.push(Part::Id(k - leg - 1));
        }
        apply_layer(&self.space, v, &parts)
    }

    /// Swaps the two legs of an element of H⊗H.
    pub fn flip_element(&self, v: &Vector) -> Vector {
        let d = self.dim() as Index;
        Vector::from_terms(v.iter().map(|(i, c)| ((i % d) * d + i / d, c.clone())))
    }

    /// Embeds x ∈ H⊗H into H⊗H⊗H at legs (a, b), with 1 on the remaining leg.
    pub fn embed_pair(&self, x: &Vector, a: usize, b: usize) -> Vector {
        let d = self.dim() as Index;
        let mut acc = Accum::new();
        for (i, c) in x.iter() {
            for (u, e) in self.one().iter() {
                let mut digits = [*u; 3];
                digits[a] = i / d;
                digits[b] = i % d;
                acc.push(digits[0] * d * d + digits[1] * d + digits[2], c * e);
            }
        }
        acc.finish()
    }

}

/// Factorwise product in H^{⊗k} for the product tensor `mu`.
pub fn mul_tensor_with(mu: &TensorMap, x: &Vector, y: &Vector, k: usize) -> Vector {
    let space = mu.space();
    let d = space.dim() as Index;
    let mut acc = Accum::new();
    let mut cur: Vec<(Index, CycScalar)> = Vec::new();
    let mut next: Vec<(Index, CycScalar)> = Vec::new();
    for (i, a) in x.iter() {
        let di = space.split(*i, k);
        for (j, b) in y.iter() {
            let dj = space.split(*j, k);
            cur.clear();
            cur.push((0, a * b));
            for s in 0..k {
                next.clear();
                let col = mu.column(di[s] as Index * d + dj[s] as Index);
                for (p, c) in cur.iter() {
                    for (t, e) in col.iter() {
                        next.push((p * d + t, c * e));
                    }
                }
                std::mem::swap(&mut cur, &mut next);
                if cur.is_empty() {
                    break;
                }
            }
            for (p, c) in cur.drain(..) {
                acc.push(p, c);
            }
        }
    }
    acc.finish()
}

/// Inverse of an element of H^{⊗k} (k = 1, 2) by solving x·y = 1 linearly.
pub fn invert_element(h: &HopfData, x: &Vector, k: usize) -> Result<Vector, HopfError> {
    let n = h.space.power(k) as usize;
    let order = h.order();
    let mut one = h.one().clone();
    for _ in 1..k {
        one = one.tensor(h.one(), h.dim() as Index);
    }
    let mut m = crate::tensor::Matrix::zero(order, n, n + 1);
    for j in 0..n {
        let col = h.mul_tensor(x, &Vector::basis(j as Index, h.space.one()), k);
        for (i, c) in col.iter() {
            m.set(*i as usize, j, c.clone());
        }
    }
    for (i, c) in one.iter() {
        m.set(*i as usize, n, -c);
    }
    let ns = m.nullspace();
    let sol = ns
        .iter()
        .find(|v| !v[n].is_zero())
        .ok_or_else(|| HopfError::Invalid("element is not invertible".into()))?;
    let scale = sol[n].inv()?;
    let y = Vector::from_terms((0..n).map(|i| (i as Index, &sol[i] * &scale)));
    if h.mul_tensor(&y, x, k) != one {
        return Err(HopfError::Invalid("element has no two-sided inverse".into()));
    }
    Ok(y)
}

const BIALG: &str = "bialgebra axioms";
const ANTIPODE: &str = "antipode axiom";

pub fn check_associativity(h: &HopfData) -> Result<(), String> {
    let d = h.dim();
    for a in 0..d {
        for b in 0..d {
            let ab = h.mul_basis(a, b);
            for c in 0..d {
                let lhs = h.mul(ab, &h.basis(c));
                let rhs = h.mul(&h.basis(a), h.mul_basis(b, c));
                if lhs != rhs {
                    return Err(format!(
                        "({}·{})·{} ≠ {}·({}·{})",
                        h.space.label(a),
                        h.space.label(b),
                        h.space.label(c),
                        h.space.label(a),
                        h.space.label(b),
                        h.space.label(c)
                    ));
                }
            }
        }
    }
    Ok(())
}

fn check_unit(h: &HopfData) -> Result<(), String> {
    first_failure(h.dim() as Index, |a| {
        let x = h.basis(a as usize);
        expect_eq(&h.space, 1, "1·a", &h.mul(h.one(), &x), &x)?;
        expect_eq(&h.space, 1, "a·1", &h.mul(&x, h.one()), &x)
    })
}

fn check_coassociativity(h: &HopfData) -> Result<(), String> {
    first_failure(h.dim() as Index, |a| {
        let da = h.delta.column(a);
        let l = apply_layer(&h.space, da, &[Part::Map(&h.delta), Part::Id(1)]);
        let r = apply_layer(&h.space, da, &[Part::Id(1), Part::Map(&h.delta)]);
        expect_eq(&h.space, 3, &format!("coassociativity at {}", h.space.label(a as usize)), &l, &r)
    })
}

fn check_counit(h: &HopfData) -> Result<(), String> {
    first_failure(h.dim() as Index, |a| {
        let da = h.delta.column(a);
        let x = h.basis(a as usize);
        let l = apply_layer(&h.space, da, &[Part::Map(&h.counit), Part::Id(1)]);
        let r = apply_layer(&h.space, da, &[Part::Id(1), Part::Map(&h.counit)]);
        expect_eq(&h.space, 1, "(ε⊗id)Δ", &l, &x)?;
        expect_eq(&h.space, 1, "(id⊗ε)Δ", &r, &x)
    })
}

/// Δ(ab) = (μ⊗μ)(id⊗Ψ⊗id)(Δa⊗Δb) on all basis pairs.
pub fn check_bialgebra_law(h: &HopfData) -> Result<(), String> {
    let d = h.dim();
    let psi = h.psi();
    let dd = h.space.power(2);
    for a in 0..d {
        let da = h.delta.column(a as Index);
        for b in 0..d {
            let db = h.delta.column(b as Index);
            let lhs = h.coproduct(h.mul_basis(a, b));
            let both = da.tensor(db, dd);
            let rhs = apply_chain(
                &h.space,
                &both,
                &[&[Part::Id(1), Part::Map(&psi), Part::Id(1)], &[Part::Map(&h.mu), Part::Map(&h.mu)]],
            );
            if lhs != rhs {
                return Err(format!(
                    "Δ({}·{}): {} ≠ {}",
                    h.space.label(a),
                    h.space.label(b),
                    lhs.render(&h.space, 2),
                    rhs.render(&h.space, 2)
                ));
            }
        }
    }
    Ok(())
}

fn check_counit_multiplicative(h: &HopfData) -> Result<(), String> {
    let d = h.dim();
    for a in 0..d {
        let ea = h.eps(&h.basis(a));
        for b in 0..d {
            let lhs = h.eps(h.mul_basis(a, b));
            let rhs = &ea * &h.eps(&h.basis(b));
            if lhs != rhs {
                return Err(format!("ε({}·{}) = {lhs} ≠ {rhs}", h.space.label(a), h.space.label(b)));
            }
        }
    }
    Ok(())
}

fn check_unit_compat(h: &HopfData) -> Result<(), String> {
    let one = h.one();
    let one_one = one.tensor(one, h.dim() as Index);
    expect_eq(&h.space, 2, "Δ(1)", &h.coproduct(one), &one_one)?;
    let e = h.eps(one);
    if !e.is_one() {
        return Err(format!("ε(1) = {e}"));
    }
    Ok(())
}

pub fn check_antipode_law(h: &HopfData) -> Result<(), String> {
    first_failure(h.dim() as Index, |a| {
        let da = h.delta.column(a);
        let x = h.basis(a as usize);
        let expected = h.one().scale(&h.eps(&x));
        let l = apply_chain(&h.space, da, &[&[Part::Map(&h.antipode), Part::Id(1)], &[Part::Map(&h.mu)]]);
        let r = apply_chain(&h.space, da, &[&[Part::Id(1), Part::Map(&h.antipode)], &[Part::Map(&h.mu)]]);
        let label = h.space.label(a as usize);
        expect_eq(&h.space, 1, &format!("μ(S⊗id)Δ({label})"), &l, &expected)?;
        expect_eq(&h.space, 1, &format!("μ(id⊗S)Δ({label})"), &r, &expected)
    })
}

fn check_antipode_inverse(h: &HopfData) -> Result<(), String> {
    let id = TensorMap::identity(&h.space, 1);
    let a = h.antipode.compose(&h.antipode_inv).map_err(|e| e.to_string())?;
    let b = h.antipode_inv.compose(&h.antipode).map_err(|e| e.to_string())?;
    if let Some(w) = a.diff(&id) {
        return Err(format!("S∘S⁻¹ ≠ id {w}"));
    }
    if let Some(w) = b.diff(&id) {
        return Err(format!("S⁻¹∘S ≠ id {w}"));
    }
    Ok(())
}

fn check_antipode_unit(h: &HopfData) -> Result<(), String> {
    expect_eq(&h.space, 1, "S(1)", &h.s(h.one()), h.one())?;
    first_failure(h.dim() as Index, |a| {
        let x = h.basis(a as usize);
        let l = h.eps(&h.s(&x));
        let r = h.eps(&x);
        if l == r {
            Ok(())
        } else {
            Err(format!("ε(S({})) = {l} ≠ {r}", h.space.label(a as usize)))
        }
    })
}

/// Verifies the (braided) Hopf algebra axioms.
pub fn check_hopf(h: &HopfData) -> Report {
    let mut r = Report::new();
    r.record("associativity", BIALG, check_associativity(h));
    r.record("unit", BIALG, check_unit(h));
    r.record("coassociativity", BIALG, check_coassociativity(h));
    r.record("counit", BIALG, check_counit(h));
    let law = if h.is_braided() { "braided bialgebra law" } else { BIALG };
    r.record("bialgebra", law, check_bialgebra_law(h));
    r.record("counit-multiplicative", BIALG, check_counit_multiplicative(h));
    r.record("unit-coproduct", BIALG, check_unit_compat(h));
    r.record("antipode", ANTIPODE, check_antipode_law(h));
    r.record("antipode-inverse", ANTIPODE, check_antipode_inverse(h));
    r.record("antipode-unit-counit", ANTIPODE, check_antipode_unit(h));
    r
}

/// S∘μ = μ∘Ψ∘(S⊗S) and (S⊗S)∘Ψ∘Δ = Δ∘S.
pub fn check_braided_antihom(h: &HopfData) -> Report {
    let mut r = Report::new();
    let psi = h.psi();
    let d = h.dim();
    let anchor = "braided anti-homomorphism";
    r.record(
        "antipode-antimultiplicative",
        anchor,
        first_failure((d * d) as Index, |j| {
            let (a, b) = (j as usize / d, j as usize % d);
            let lhs = h.s(h.mul_basis(a, b));
            let sa_sb = h.s(&h.basis(a)).tensor(&h.s(&h.basis(b)), d as Index);
            let rhs = apply_chain(&h.space, &sa_sb, &[&[Part::Map(&psi)], &[Part::Map(&h.mu)]]);
            expect_eq(&h.space, 1, &format!("S({}·{})", h.space.label(a), h.space.label(b)), &lhs, &rhs)
        }),
    );
    r.record(
        "antipode-anticomultiplicative",
        anchor,
        first_failure(d as Index, |a| {
            let lhs = h.coproduct(h.antipode.column(a));
            let rhs = apply_chain(
                &h.space,
                h.delta.column(a),
                &[&[Part::Map(&psi)], &[Part::Map(&h.antipode), Part::Map(&h.antipode)]],
            );
            expect_eq(&h.space, 2, &format!("ΔS({})", h.space.label(a as usize)), &lhs, &rhs)
        }),
    );
    r
}

/// Quasitriangular axioms for the stored R-matrix.
pub fn check_quasitriangular(h: &HopfData) -> Report {
    let mut r = Report::new();
    let anchor = "quasitriangular structure";
    let Some(rm) = &h.rmatrix else {
        r.record("rmatrix-present", anchor, Err("no R-matrix".into()));
        return r;
    };
    let d = h.dim() as Index;
    let r13 = h.embed_pair(rm, 0, 2);
    let r23 = h.embed_pair(rm, 1, 2);
    let r12 = h.embed_pair(rm, 0, 1);
    let lhs = apply_layer(&h.space, rm, &[Part::Map(&h.delta), Part::Id(1)]);
    r.record("delta-left", anchor, expect_eq(&h.space, 3, "(Δ⊗id)R vs R13R23", &lhs, &h.mul_tensor(&r13, &r23, 3)));
    let lhs = apply_layer(&h.space, rm, &[Part::Id(1), Part::Map(&h.delta)]);
    r.record("delta-right", anchor, expect_eq(&h.space, 3, "(id⊗Δ)R vs R13R12", &lhs, &h.mul_tensor(&r13, &r12, 3)));
    r.record(
        "intertwines",
        anchor,
        first_failure(d, |a| {
            let da = h.delta.column(a);
            let lhs = h.mul_tensor(rm, da, 2);
            let rhs = h.mul_tensor(&h.flip_element(da), rm, 2);
            expect_eq(&h.space, 2, &format!("RΔ({})", h.space.label(a as usize)), &lhs, &rhs)
        }),
    );
    let l = apply_layer(&h.space, rm, &[Part::Map(&h.counit), Part::Id(1)]);
    let rr = apply_layer(&h.space, rm, &[Part::Id(1), Part::Map(&h.counit)]);
    r.record(
        "counit",
        anchor,
        expect_eq(&h.space, 1, "(ε⊗id)R", &l, h.one()).and_then(|_| expect_eq(&h.space, 1, "(id⊗ε)R", &rr, h.one())),
    );
    let inv = rmatrix_inverse(h, rm);
    let one2 = h.one().tensor(h.one(), d);
    r.record(
        "inverse-S-id",
        anchor,
        expect_eq(&h.space, 2, "R·(S⊗id)R", &h.mul_tensor(rm, &inv, 2), &one2)
            .and_then(|_| expect_eq(&h.space, 2, "(S⊗id)R·R", &h.mul_tensor(&inv, rm, 2), &one2)),
    );
    r
}

/// R⁻¹ = (S⊗id)R for a quasitriangular structure.
pub fn rmatrix_inverse(h: &HopfData, rm: &Vector) -> Vector {
    h.on_leg(&h.antipode, rm, 0, 2)
}

/// Basis of the right-invariant functionals: (∫⊗id)Δh = ∫(h)·1.
pub fn right_integral_space(h: &HopfData) -> Vec<Vector> {
    let d = h.dim();
    let mut rr = RowReducer::new(h.order(), d);
    for a in 0..d {
        // one equation per output basis element b
        let mut rows: BTreeMap<usize, Vec<(usize, CycScalar)>> = BTreeMap::new();
        for (idx, c) in h.delta.column(a as Index).iter() {
            let (x, b) = (*idx as usize / d, *idx as usize % d);
            rows.entry(b).or_default().push((x, c.clone()));
        }
        for (b, u) in h.one().iter() {
            rows.entry(*b as usize).or_default().push((a, -u));
        }
        for row in rows.values() {
            rr.add_row(row);
        }
    }
    rr.nullspace().into_iter().map(|v| Vector::from_terms(v.into_iter().enumerate().map(|(i, c)| (i as Index, c)))).collect()
}

/// Basis of the left integral elements: hΛ = ε(h)Λ.
pub fn left_integral_space(h: &HopfData) -> Vec<Vector> {
    let d = h.dim();
    let mut rr = RowReducer::new(h.order(), d);
    for a in 0..d {
        let e = h.eps(&h.basis(a));
        let mut rows: BTreeMap<usize, Vec<(usize, CycScalar)>> = BTreeMap::new();
        for j in 0..d {
            for (k, c) in h.mul_basis(a, j).iter() {
                rows.entry(*k as usize).or_default().push((j, c.clone()));
            }
        }
        if !e.is_zero() {
            for k in 0..d {
                rows.entry(k).or_default().push((k, -&e));
            }
        }
        for row in rows.values() {
            rr.add_row(row);
        }
    }
    rr.nullspace().into_iter().map(|v| Vector::from_terms(v.into_iter().enumerate().map(|(i, c)| (i as Index, c)))).collect()
}

pub fn solve_right_integral(h: &HopfData) -> Result<Vector, HopfError> {
    let mut sp = right_integral_space(h);
    if sp.len() != 1 {
        return Err(HopfError::IntegralDimension { what: "right integral", dim: sp.len() });
    }
    Ok(sp.pop().unwrap())
}

pub fn solve_left_integral_element(h: &HopfData) -> Result<Vector, HopfError> {
    let mut sp = left_integral_space(h);
    if sp.len() != 1 {
        return Err(HopfError::IntegralDimension { what: "left integral element", dim: sp.len() });
    }
    Ok(sp.pop().unwrap())
}

/// Rescales the functional so that ∫Λ = 1.
pub fn normalize(h: &HopfData, integral: &Vector, lambda: &Vector) -> Result<Integrals, HopfError> {
    let pairing = pair(integral, lambda, h.order());
    if pairing.is_zero() {
        return Err(HopfError::ZeroNormalization);
    }
    let f = integral.scale(&pairing.inv()?);
    Ok(Integrals {
        integral: TensorMap::functional(&h.space, 1, &f),
        lambda: TensorMap::element(&h.space, 1, lambda.clone()),
    })
}

pub(crate) fn pair(f: &Vector, v: &Vector, order: u32) -> CycScalar {
    let mut acc = CycScalar::zero(order);
    for (i, c) in v.iter() {
        if let Some(x) = f.get(*i) {
            acc += &(x * c);
        }
    }
    acc
}

/// Solves and normalises both integrals.
pub fn solve_integrals(h: &HopfData) -> Result<Integrals, HopfError> {
    let f = solve_right_integral(h)?;
    let l = solve_left_integral_element(h)?;
    normalize(h, &f, &l)
}

/// Checks that solved integrals are proportional to supplied ones.
pub fn check_integrals_against(h: &HopfData, expected: &Integrals) -> Report {
    let mut r = Report::new();
    let anchor = "integrals unique up to scale";
    match solve_right_integral(h) {
        Ok(f) => {
            let want = expected.integral.as_covector();
            r.record(
                "right-integral",
                anchor,
                f.ratio_to(&want).map(|_| ()).ok_or_else(|| format!("solver gave {}", f.render(&h.space, 1))),
            );
        }
        Err(e) => r.record("right-integral", anchor, Err(e.to_string())),
    }
    match solve_left_integral_element(h) {
        Ok(l) => r.record(
            "left-integral-element",
            anchor,
            l.ratio_to(expected.lambda_element()).map(|_| ()).ok_or_else(|| format!("solver gave {}", l.render(&h.space, 1))),
        ),
        Err(e) => r.record("left-integral-element", anchor, Err(e.to_string())),
    }
    let v = expected.eval(expected.lambda_element());
    r.record("normalised", anchor, if v.is_one() { Ok(()) } else { Err(format!("∫Λ = {v}")) });
    r
}

/// Unimodularity flags (reported as notes, never failures).
pub fn check_unimodular_flags(h: &HopfData, ints: &Integrals) -> Report {
    let mut r = Report::new();
    let d = h.dim() as Index;
    let anchor = "unimodularity";
    let int = &ints.integral;
    let lam = ints.lambda_element();
    let left_inv = (0..d).all(|a| {
        let v = apply_layer(&h.space, h.delta.column(a), &[Part::Id(1), Part::Map(int)]);
        v == h.one().scale(&ints.eval(&h.basis(a as usize)))
    });
    let lambda_right = (0..d).all(|a| {
        let x = h.basis(a as usize);
        h.mul(lam, &x) == lam.scale(&h.eps(&x))
    });
    let int_s = h.antipode.compose(int).map(|m| &m == int).unwrap_or(false);
    let lambda_s = &h.s(lam) == lam;
    r.note("integral-two-sided", anchor, left_inv.to_string());
    r.note("lambda-two-sided", anchor, lambda_right.to_string());
    r.note("integral-S-invariant", anchor, int_s.to_string());
    r.note("lambda-S-invariant", anchor, lambda_s.to_string());
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualVariant {
    /// H* with the transposed structure maps.
    Standard,
    /// H*^{op,cop}: opposite product and coproduct.
    OpCop,
}

/// The dual Hopf algebra on the dual basis.
pub fn dual_hopf(h: &HopfData, variant: DualVariant) -> Result<HopfData, HopfError> {
    let labels = h.space.labels().iter().map(|l| format!("δ[{l}]")).collect();
    let space = Space::new(h.order(), labels)?;
    let t = |m: &TensorMap| m.transpose().with_space(&space);
    let mut mu = t(&h.delta)?;
    let mut delta = t(&h.mu)?;
    if variant == DualVariant::OpCop {
        let flip = TensorMap::flip(&space, 2, 0)?;
        mu = flip.compose(&mu)?;
        delta = delta.compose(&flip)?;
    }
    let mut out = HopfData::new(
        format!("dual({})", h.name),
        space.clone(),
        mu,
        t(&h.counit)?,
        delta,
        t(&h.unit)?,
        t(&h.antipode)?,
        Some(t(&h.antipode_inv)?),
    )?;
    if let Some(b) = &h.braiding {
        out.braiding = Some(b.transpose().with_space(&space)?);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct TensorDoc {
    inputs: usize,
    outputs: usize,
    /// (input index, output index, scalar) sorted by input then output.
    entries: Vec<(Index, Index, String)>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct HopfDoc {
    schema: u32,
    name: String,
    n: u32,
    labels: Vec<String>,
    tensors: BTreeMap<String, TensorDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rmatrix: Option<Vec<(Index, String)>>,
}

fn encode_tensor(m: &TensorMap) -> TensorDoc {
    let mut entries = Vec::new();
    for (j, c) in m.columns().iter().enumerate() {
        for (i, x) in c.iter() {
            entries.push((j as Index, *i, x.to_string()));
        }
    }
    TensorDoc { inputs: m.inputs(), outputs: m.outputs(), entries }
}

fn decode_tensor(space: &Arc<Space>, doc: &TensorDoc, want: (usize, usize)) -> Result<TensorMap, HopfError> {
    if (doc.inputs, doc.outputs) != want {
        return Err(HopfError::Decode(format!("tensor arity {:?}, expected {want:?}", (doc.inputs, doc.outputs))));
    }
    if doc.inputs > 4 || doc.outputs > 4 {
        return Err(HopfError::Decode("arity too large".into()));
    }
    let (nin, nout) = (space.power(doc.inputs), space.power(doc.outputs));
    let mut cols: Vec<Vec<(Index, CycScalar)>> = vec![Vec::new(); nin as usize];
    for (j, i, s) in &doc.entries {
        if *j >= nin || *i >= nout {
            return Err(HopfError::Decode(format!("index ({j},{i}) out of range")));
        }
        let x = CycScalar::parse(space.order(), s)?;
        cols[*j as usize].push((*i, x));
    }
    let cols = cols.into_iter().map(Vector::from_terms).collect();
    Ok(TensorMap::from_columns(space, doc.inputs, doc.outputs, cols)?)
}

/// Serialises to the versioned JSON document.
pub fn to_json(h: &HopfData) -> String {
    let mut tensors = BTreeMap::new();
    tensors.insert("mu".to_string(), encode_tensor(&h.mu));
    tensors.insert("unit".to_string(), encode_tensor(&h.unit));
    tensors.insert("delta".to_string(), encode_tensor(&h.delta));
    tensors.insert("counit".to_string(), encode_tensor(&h.counit));
    tensors.insert("antipode".to_string(), encode_tensor(&h.antipode));
    tensors.insert("antipode_inv".to_string(), encode_tensor(&h.antipode_inv));
    if let Some(b) = &h.braiding {
        tensors.insert("braiding".to_string(), encode_tensor(b));
    }
    let doc = HopfDoc {
        schema: 1,
        name: h.name.clone(),
        n: h.order(),
        labels: h.space.labels().to_vec(),
        tensors,
        rmatrix: h.rmatrix.as_ref().map(|r| r.iter().map(|(i, c)| (*i, c.to_string())).collect()),
    };
    serde_json::to_string_pretty(&doc).expect("serialisable")
}

/// Parses a JSON document produced by [`to_json`].
pub fn from_json(text: &str) -> Result<HopfData, HopfError> {
    let doc: HopfDoc = serde_json::from_str(text).map_err(|e| HopfError::Decode(e.to_string()))?;
    if doc.schema != 1 {
        return Err(HopfError::Decode(format!("unsupported schema {}", doc.schema)));
    }
    if !(1..=crate::scalar::MAX_ORDER).contains(&doc.n) {
        return Err(HopfError::Decode(format!("bad order {}", doc.n)));
    }
    if doc.labels.len() > 4096 {
        return Err(HopfError::Decode("basis too large".into()));
    }
    let space = Space::new(doc.n, doc.labels)?;
    if space.dim().pow(2) > 1 << 20 {
        return Err(HopfError::Decode("basis too large".into()));
    }
    let get = |k: &str, want| {
        doc.tensors.get(k).ok_or_else(|| HopfError::Decode(format!("missing tensor {k}"))).and_then(|t| decode_tensor(&space, t, want))
    };
    let mut h = HopfData::new(
        doc.name.clone(),
        space.clone(),
        get("mu", (2, 1))?,
        get("unit", (0, 1))?,
        get("delta", (1, 2))?,
        get("counit", (1, 0))?,
        get("antipode", (1, 1))?,
        Some(get("antipode_inv", (1, 1))?),
    )?;
    if doc.tensors.contains_key("braiding") {
        h.braiding = Some(get("braiding", (2, 2))?);
    }
    if let Some(r) = &doc.rmatrix {
        let bound = space.power(2);
        let mut terms = Vec::new();
        for (i, s) in r {
            if *i >= bound {
                return Err(HopfError::Decode(format!("R-matrix index {i} out of range")));
            }
            terms.push((*i, CycScalar::parse(space.order(), s)?));
        }
        h.rmatrix = Some(Vector::from_terms(terms));
    }
    Ok(h)
}
