//! Amplification of a Hopf algebra with integrals to an interacting red/green pair.

use crate::frobenius::FrobeniusAlgebra;
use crate::hopf::{check_hopf, HopfData, HopfError, Integrals};
use crate::report::Report;
use crate::scalar::CycScalar;
use crate::tensor::{Accum, Index, TensorMap, Vector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FHopfError {
    #[error("integrals are not normalised: ∫Λ = {0}")]
    NotNormalised(String),
    #[error("invariant {id} failed: {detail}")]
    Invariant { id: String, detail: String },
    #[error(transparent)]
    Hopf(#[from] HopfError),
}

impl From<crate::tensor::TensorError> for FHopfError {
    fn from(e: crate::tensor::TensorError) -> Self {
        FHopfError::Hopf(e.into())
    }
}

/// The interacting pair built from (H, ∫, Λ): red product with green coproduct
/// is H itself, green product with red coproduct is the associated Hopf algebra.
#[derive(Clone, Debug)]
pub struct FHopfBundle {
    pub base: HopfData,
    pub integrals: Integrals,
    /// μ_r, 1, Δ_r, ∫ with (,)_r and g_r.
    pub red: FrobeniusAlgebra,
    /// μ_g, Λ, Δ_g, ε with (,)_g and g_g.
    pub green: FrobeniusAlgebra,
    pub tilde_s: TensorMap,
    pub associated: HopfData,
}

impl FHopfBundle {
    pub fn order(&self) -> u32 {
        self.base.order()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn green_mul(&self, a: &Vector, b: &Vector) -> Vector {
        self.green.mul(a, b)
    }

    pub fn red_coproduct(&self, a: &Vector) -> Vector {
        self.red.delta.apply(a)
    }

    pub fn green_unit(&self) -> &Vector {
        self.green.one()
    }

    pub fn is_braided(&self) -> bool {
        self.base.is_braided()
    }
}

fn elementwise(h: &HopfData, v: &Vector, f: impl Fn(usize, usize, &CycScalar, &mut Accum)) -> Vector {
    let d = h.dim() as Index;
    let mut acc = Accum::new();
    for (i, c) in v.iter() {
        f((i / d) as usize, (i % d) as usize, c, &mut acc);
    }
    acc.finish()
}

/// Builds all bundle fields without verifying them. The red metric comes from
/// (id⊗S)ΔΛ rather than from inverting ∫∘μ, so a failing snake identity is observable.
pub fn assemble(h: &HopfData, ints: &Integrals, reverse_braiding: Option<TensorMap>) -> Result<FHopfBundle, FHopfError> {
    let space = &h.space;
    let lambda = ints.lambda_element().clone();
    let norm = ints.eval(&lambda);
    if norm.is_zero() {
        return Err(FHopfError::NotNormalised(norm.render()));
    }
    let red_form = h.mu.compose(&ints.integral)?;
    let delta_lambda = h.coproduct(&lambda);
    let g_red = h.on_leg(&h.antipode, &delta_lambda, 1, 2);
    let red_metric = TensorMap::element(space, 2, g_red.clone());
    let red = FrobeniusAlgebra::from_form_and_metric(&h.mu, &h.unit, &red_form, &red_metric);

    let g_green = h.on_leg(&h.antipode_inv, &g_red, 1, 2);
    let green_metric = TensorMap::element(space, 2, g_green);
    let s_first = h.antipode.tensor(&TensorMap::identity(space, 1))?;
    let green_form = s_first.compose(&red_form)?;
    let green = FrobeniusAlgebra::from_metric_and_form(&h.delta, &h.counit, &green_metric, &green_form);

    let tilde_s = TensorMap::from_fn(space, 1, 1, |j| {
        let hj = Vector::basis(j, space.one());
        elementwise(h, &delta_lambda, |a, b, c, acc| {
            let v = ints.eval(&h.mul(&h.basis(b), &hj));
            if !v.is_zero() {
                acc.push(a as Index, c * &v);
            }
        })
    });
    let mut associated = HopfData::new(
        format!("{}~", h.name),
        space.clone(),
        green.mu.clone(),
        green.unit.clone(),
        red.delta.clone(),
        red.counit.clone(),
        tilde_s.clone(),
        None,
    )?;
    if h.is_braided() {
        associated.braiding = Some(match reverse_braiding {
            Some(b) => b,
            None => h.psi().invert_square()?,
        });
    }
    Ok(FHopfBundle { base: h.clone(), integrals: ints.clone(), red, green, tilde_s, associated })
}

trait InvertSquare {
    fn invert_square(&self) -> Result<TensorMap, HopfError>;
}

impl InvertSquare for TensorMap {
    /// Inverse of a (2,2) map by dense inversion (small spaces only).
    fn invert_square(&self) -> Result<TensorMap, HopfError> {
        let inv = self.as_matrix().inverse()?;
        Ok(TensorMap::from_matrix(self.space(), 2, 2, &inv)?)
    }
}

/// Amplifies and verifies every bundle invariant; the first failure is returned as an error.
pub fn amplify(h: &HopfData, ints: &Integrals) -> Result<FHopfBundle, FHopfError> {
    amplify_with(h, ints, None)
}

pub fn amplify_with(h: &HopfData, ints: &Integrals, reverse_braiding: Option<TensorMap>) -> Result<FHopfBundle, FHopfError> {
    let b = assemble(h, ints, reverse_braiding)?;
    let norm = ints.eval(ints.lambda_element());
    if !norm.is_one() {
        return Err(FHopfError::NotNormalised(norm.render()));
    }
    let r = check_bundle(&b);
    if let Some(f) = r.failures().next() {
        return Err(FHopfError::Invariant { id: f.id.clone(), detail: f.detail.clone().unwrap_or_default() });
    }
    Ok(b)
}

/// Bundle invariants: normalisation, both Frobenius structures, the antipode
/// special form and the associated Hopf algebra.
pub fn check_bundle(b: &FHopfBundle) -> Report {
    let mut r = check_bundle_forms(b);
    r.merge_prefixed("associated", check_hopf(&b.associated));
    r
}

/// The invariants not involving the associated Hopf algebra's axioms.
pub fn check_bundle_forms(b: &FHopfBundle) -> Report {
    let mut r = Report::new();
    let h = &b.base;
    let lambda = b.integrals.lambda_element();
    let one = CycScalar::one(h.order());
    let norm = b.integrals.eval(lambda);
    r.record("integral-normalised", "corHH*", if norm == one { Ok(()) } else { Err(format!("∫Λ = {norm}")) });
    let s_norm = b.integrals.eval(&h.s(lambda));
    r.record("integral-S-lambda", "corHH*", if s_norm == one { Ok(()) } else { Err(format!("∫SΛ = {s_norm}")) });
    r.merge_prefixed("red", b.red.check());
    r.merge_prefixed("green", b.green.check());
    let back = h.on_leg(&h.antipode, b.green.metric.as_element(), 1, 2);
    r.record(
        "antipode-special-form",
        "corHH*",
        crate::hopf::expect_eq(&h.space, 2, "(id⊗S)g_g vs g_r", &back, b.red.metric.as_element()),
    );
    r
}

/// Conditions of the interaction proposition, both pairing orientations recorded.
pub fn check_interaction(b: &FHopfBundle) -> Report {
    let mut r = Report::new();
    let h = &b.base;
    let d = h.dim();
    let lambda = b.integrals.lambda_element();
    let one = h.one().clone();
    let orient = |f: &dyn Fn(&Vector) -> CycScalar, g: &dyn Fn(&Vector) -> CycScalar| -> bool {
        (0..d).all(|i| {
            let x = h.basis(i);
            f(&x) == g(&x)
        })
    };
    let eps_g = |x: &Vector| h.eps(x);
    let eps_r = |x: &Vector| b.integrals.eval(x);
    let left_r = orient(&|x| b.red.pair(lambda, x), &eps_g);
    let right_r = orient(&|x| b.red.pair(x, lambda), &eps_g);
    let left_g = orient(&|x| b.green.pair(&one, x), &eps_r);
    let right_g = orient(&|x| b.green.pair(x, &one), &eps_r);
    let flag = |v: bool| if v { "holds" } else { "fails" };
    r.note("red-dual-unit-left", "propFant", flag(left_r));
    r.note("red-dual-unit-right", "propFant", flag(right_r));
    r.note("green-dual-unit-left", "propFant", flag(left_g));
    r.note("green-dual-unit-right", "propFant", flag(right_g));
    r.record(
        "red-dual-unit",
        "propFant",
        if left_r || right_r { Ok(()) } else { Err("(1_g, h)_r = ε_g(h) holds in neither orientation".into()) },
    );
    r.record(
        "green-dual-unit",
        "propFant",
        if left_g || right_g { Ok(()) } else { Err("(1_r, h)_g = ∫h holds in neither orientation".into()) },
    );
    r.merge_prefixed("red-product", check_hopf(&b.base));
    r.merge_prefixed("green-product", check_hopf(&b.associated));
    r.note("red-form-symmetric", "propFant", flag(is_symmetric(&b.red.form)));
    r.note("green-form-symmetric", "propFant", flag(is_symmetric(&b.green.form)));
    r
}

pub fn is_symmetric(form: &TensorMap) -> bool {
    let m = form.pairing_matrix();
    m == m.transpose()
}

/// (ε(Λ), ∫1): μ_r(g_r) = ε(Λ)·1 and μ_g(g_g) = ∫1·Λ.
pub fn quasispecial_constants(b: &FHopfBundle) -> (CycScalar, CycScalar) {
    let lambda = b.integrals.lambda_element();
    (b.base.eps(lambda), b.integrals.eval(b.base.one()))
}

/// Which structures a candidate isomorphism reverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoVariant {
    Plain,
    /// onto the opposite algebra
    Op,
    /// onto the co-opposite coalgebra
    Cop,
    OpCop,
}

impl IsoVariant {
    pub const ALL: [IsoVariant; 4] = [IsoVariant::Plain, IsoVariant::Op, IsoVariant::Cop, IsoVariant::OpCop];

    fn op(self) -> bool {
        matches!(self, IsoVariant::Op | IsoVariant::OpCop)
    }

    fn cop(self) -> bool {
        matches!(self, IsoVariant::Cop | IsoVariant::OpCop)
    }

    pub fn name(self) -> &'static str {
        match self {
            IsoVariant::Plain => "plain",
            IsoVariant::Op => "op",
            IsoVariant::Cop => "cop",
            IsoVariant::OpCop => "op-cop",
        }
    }
}

/// Checks that φ: src → dst is a Hopf isomorphism (onto the op/cop variant of dst).
pub fn check_hopf_iso(src: &HopfData, dst: &HopfData, phi: &TensorMap, variant: IsoVariant) -> Report {
    let mut r = Report::new();
    let d = src.dim();
    let space = &src.space;
    let rank = phi.as_matrix().rank();
    r.record("bijective", "iso", if rank == d { Ok(()) } else { Err(format!("rank {rank} < {d}")) });
    let image_one = phi.apply(src.one());
    r.record("unit", "iso", crate::hopf::expect_eq(space, 1, "φ(1)", &image_one, dst.one()));
    let mut mult = Ok(());
    'outer: for a in 0..d {
        let pa = phi.column(a as Index);
        for c in 0..d {
            let pc = phi.column(c as Index);
            let lhs = phi.apply(src.mul_basis(a, c));
            let rhs = if variant.op() { dst.mul(pc, pa) } else { dst.mul(pa, pc) };
            if lhs != rhs {
                mult = Err(format!(
                    "φ({}·{}) = {} but product of images is {}",
                    space.label(a),
                    space.label(c),
                    lhs.render(space, 1),
                    rhs.render(space, 1)
                ));
                break 'outer;
            }
        }
    }
    r.record("multiplicative", "iso", mult);
    let mut comult = Ok(());
    for a in 0..d {
        let through_src = phi.tensor(phi).expect("arity").apply(src.delta.column(a as Index));
        let dst_delta = dst.coproduct(phi.column(a as Index));
        let rhs = if variant.cop() { dst.flip_element(&dst_delta) } else { dst_delta };
        if through_src != rhs {
            comult = Err(format!(
                "Δφ({}) = {} but (φ⊗φ)Δ gives {}",
                space.label(a),
                rhs.render(space, 2),
                through_src.render(space, 2)
            ));
            break;
        }
    }
    r.record("comultiplicative", "iso", comult);
    let mut counit = Ok(());
    for a in 0..d {
        let l = dst.eps(phi.column(a as Index));
        let rr = src.eps(&src.basis(a));
        if l != rr {
            counit = Err(format!("ε(φ({})) = {l}, expected {rr}", space.label(a)));
            break;
        }
    }
    r.record("counit", "iso", counit);
    let mut anti = Ok(());
    for a in 0..d {
        let l = phi.apply(&src.s(&src.basis(a)));
        let s_img = dst.s(phi.column(a as Index));
        // op or cop alone turns S into S⁻¹
        let rr = if variant.op() != variant.cop() { dst.s_inv(phi.column(a as Index)) } else { s_img };
        if l != rr {
            anti = Err(format!("φ(S {}) = {} vs {}", space.label(a), l.render(space, 1), rr.render(space, 1)));
            break;
        }
    }
    r.record("antipode", "iso", anti);
    r
}

/// Extends generator images to a linear map using the presentation words and
/// the green product (reversed for the op variant).
pub fn extend_generators(
    b: &FHopfBundle,
    words: &[Vec<usize>],
    images: &[Vector],
    variant: IsoVariant,
) -> TensorMap {
    let unit = b.green_unit().clone();
    TensorMap::from_fn(&b.base.space, 1, 1, |j| {
        let w = &words[j as usize];
        let mut acc = unit.clone();
        for g in w {
            acc = if variant.op() { b.green_mul(&images[*g], &acc) } else { b.green_mul(&acc, &images[*g]) };
        }
        acc
    })
}

/// φ from generator images, then checked as a Hopf isomorphism H → associated.
pub fn check_associated_iso(b: &FHopfBundle, words: &[Vec<usize>], images: &[Vector], variant: IsoVariant) -> Report {
    let phi = extend_generators(b, words, images, variant);
    check_hopf_iso(&b.base, &b.associated, &phi, variant)
}

/// Compares S̃ with the antipode of the associated algebra by direct antipode-law
/// evaluation; antipodes are unique, so this settles which form is correct.
pub fn check_tilde_s(b: &FHopfBundle) -> Report {
    let mut r = Report::new();
    r.record("tilde-S-antipode", "propFhopf", crate::hopf::check_antipode_law(&b.associated));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn bundle(id: &str) -> FHopfBundle {
        let m = models::build(id).unwrap();
        amplify(&m.hopf, &m.integrals).unwrap()
    }

    #[test]
    fn kx_green_product() {
        let b = bundle("kX:S3");
        for x in 0..6 {
            for y in 0..6 {
                let p = b.green_mul(&b.base.basis(x), &b.base.basis(y));
                let expected = if x == y { b.base.basis(x) } else { Vector::zero() };
                assert_eq!(p, expected);
            }
        }
        let all = Vector::from_terms((0..6).map(|i| (i as Index, CycScalar::one(1))));
        assert_eq!(b.green_unit(), &all);
        assert_eq!(quasispecial_constants(&b), (CycScalar::from_int(1, 6), CycScalar::one(1)));
    }

    #[test]
    fn green_product_direct_formula() {
        let m = models::build("taft:3").unwrap();
        let b = amplify(&m.hopf, &m.integrals).unwrap();
        let h = &b.base;
        for x in 0..h.dim() {
            let sd = h.on_leg(&h.antipode, h.delta.column(x as Index), 1, 2);
            for y in 0..h.dim() {
                let d = h.dim() as Index;
                let mut acc = Accum::new();
                for (i, c) in sd.iter() {
                    let v = b.integrals.eval(&h.mul(&h.basis((i % d) as usize), &h.basis(y)));
                    acc.push(i / d, c * &v);
                }
                assert_eq!(b.green_mul(&h.basis(x), &h.basis(y)), acc.finish());
            }
        }
    }

    #[test]
    fn metric_matches_inversion() {
        let b = bundle("uqsl2:3");
        assert_eq!(b.red.form.invert().unwrap(), b.red.metric);
        assert!(!is_symmetric(&b.red.form));
        let (e, i) = quasispecial_constants(&b);
        assert!(e.is_zero() && i.is_zero());
    }

    #[test]
    fn unnormalised_rejected() {
        let m = models::build("kX:Z2").unwrap();
        let mut ints = m.integrals.clone();
        ints.lambda = ints.lambda.scale(&CycScalar::from_int(2, 2));
        assert!(matches!(amplify(&m.hopf, &ints), Err(FHopfError::NotNormalised(_))));
    }

    #[test]
    fn green_kz2_is_function_algebra() {
        let b = bundle("kX:Z2");
        let f = models::build("fun:Z2").unwrap();
        let phi = TensorMap::identity(&b.base.space, 1);
        let target = f.hopf.clone();
        let target = HopfData { space: b.base.space.clone(), ..target };
        let retag = |t: &TensorMap| t.with_space(&b.base.space).unwrap();
        let target = HopfData {
            mu: retag(&target.mu),
            unit: retag(&target.unit),
            delta: retag(&target.delta),
            counit: retag(&target.counit),
            antipode: retag(&target.antipode),
            antipode_inv: retag(&target.antipode_inv),
            ..target
        };
        let r = check_hopf_iso(&b.associated, &target, &phi, IsoVariant::Plain);
        assert!(r.all_passed(), "{r:?}");
    }
}
