//! Flip-Hopf *-structures, θ = S∘*, Frobenius *-forms and the green star.

use crate::fhopf::FHopfBundle;
use crate::frobenius::FrobeniusAlgebra;
use crate::hopf::{expect_eq, HopfData};
use crate::report::Report;
use crate::tensor::{AntiLinear, Index, Matrix, TensorMap, Vector};

/// *, θ = S∘* and † = flip∘(*⊗*) on H⊗H.
#[derive(Clone, Debug)]
pub struct StarStructure {
    pub star: AntiLinear,
    pub theta: AntiLinear,
}

impl StarStructure {
    pub fn new(h: &HopfData, star: AntiLinear) -> StarStructure {
        let theta = star.then_linear(&h.antipode).expect("arity");
        StarStructure { star, theta }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        self.star.apply(v)
    }

    pub fn dagger(&self, h: &HopfData, v: &Vector) -> Vector {
        h.flip_element(&self.star.tensor(&self.star).expect("arity").apply(v))
    }
}

fn all_basis(d: usize, mut f: impl FnMut(usize) -> Result<(), String>) -> Result<(), String> {
    for i in 0..d {
        f(i)?;
    }
    Ok(())
}

fn antimultiplicative(h: &HopfData, mu: &TensorMap, star: &AntiLinear) -> Result<(), String> {
    let d = h.dim();
    let mul = |a: &Vector, b: &Vector| crate::hopf::mul_tensor_with(mu, a, b, 1);
    for a in 0..d {
        let sa = star.apply(&h.basis(a));
        for b in 0..d {
            let lhs = star.apply(mu.column((a * d + b) as Index));
            let rhs = mul(&star.apply(&h.basis(b)), &sa);
            if lhs != rhs {
                return expect_eq(&h.space, 1, &format!("({}·{})*", h.space.label(a), h.space.label(b)), &lhs, &rhs);
            }
        }
    }
    Ok(())
}

fn involutive(h: &HopfData, star: &AntiLinear) -> Result<(), String> {
    all_basis(h.dim(), |i| {
        let b = h.basis(i);
        expect_eq(&h.space, 1, &format!("**{}", h.space.label(i)), &star.apply(&star.apply(&b)), &b)
    })
}

/// Flip-Hopf *-algebra axioms for (H, *).
pub fn check_flip_star(h: &HopfData, star: &AntiLinear) -> Report {
    let mut r = Report::new();
    let st = StarStructure::new(h, star.clone());
    let d = h.dim();
    r.record("star-involutive", "flip-star", involutive(h, star));
    r.record("star-antimultiplicative", "flip-star", antimultiplicative(h, &h.mu, star));
    r.record(
        "star-unit",
        "flip-star",
        expect_eq(&h.space, 1, "1*", &star.apply(h.one()), h.one()),
    );
    r.record(
        "coproduct-dagger",
        "flip-star",
        all_basis(d, |i| {
            let b = h.basis(i);
            expect_eq(&h.space, 2, &format!("Δ({}*)", h.space.label(i)), &h.coproduct(&star.apply(&b)), &st.dagger(h, &h.coproduct(&b)))
        }),
    );
    r.record(
        "counit-conj",
        "flip-star",
        all_basis(d, |i| {
            let b = h.basis(i);
            let (l, rr) = (h.eps(&star.apply(&b)), h.eps(&b).conj());
            if l == rr {
                Ok(())
            } else {
                Err(format!("ε({}*) = {l} vs {rr}", h.space.label(i)))
            }
        }),
    );
    r.record(
        "antipode-commutes",
        "flip-star",
        all_basis(d, |i| {
            let b = h.basis(i);
            expect_eq(&h.space, 1, &format!("S({}*)", h.space.label(i)), &h.s(&star.apply(&b)), &star.apply(&h.s(&b)))
        }),
    );
    r.record("theta-multiplicative", "theta", {
        let mut res = Ok(());
        'o: for a in 0..d {
            for b in 0..d {
                let lhs = st.theta.apply(h.mul_basis(a, b));
                let rhs = h.mul(&st.theta.apply(&h.basis(a)), &st.theta.apply(&h.basis(b)));
                if lhs != rhs {
                    res = expect_eq(&h.space, 1, "θ(ab)", &lhs, &rhs);
                    break 'o;
                }
            }
        }
        res
    });
    r.record(
        "theta-comultiplicative",
        "theta",
        all_basis(d, |i| {
            let b = h.basis(i);
            let lhs = h.coproduct(&st.theta.apply(&b));
            let rhs = st.theta.tensor(&st.theta).expect("arity").apply(&h.coproduct(&b));
            expect_eq(&h.space, 2, &format!("Δθ({})", h.space.label(i)), &lhs, &rhs)
        }),
    );
    let theta2 = st.theta.then_anti(&st.theta);
    let s2 = h.antipode.compose(&h.antipode).expect("arity");
    r.record("theta-squared", "theta", theta2.diff(&s2).map_or(Ok(()), Err));
    r
}

/// Def "starform": conj((a,b)) = (b*,a*), g† = g, and the derived coalgebra is
/// compatible with *.
pub fn check_frobenius_star(h: &HopfData, f: &FrobeniusAlgebra, star: &AntiLinear) -> Report {
    let mut r = Report::new();
    let st = StarStructure::new(h, star.clone());
    let d = h.dim();
    r.record("form-star", "starform", {
        let mut res = Ok(());
        'o: for a in 0..d {
            for b in 0..d {
                let (va, vb) = (h.basis(a), h.basis(b));
                let lhs = f.pair(&va, &vb).conj();
                let rhs = f.pair(&star.apply(&vb), &star.apply(&va));
                if lhs != rhs {
                    res = Err(format!("conj(({}, {})) = {lhs} vs {rhs}", h.space.label(a), h.space.label(b)));
                    break 'o;
                }
            }
        }
        res
    });
    let g = f.metric.as_element();
    r.record("metric-dagger", "starform", expect_eq(&h.space, 2, "g†", &st.dagger(h, g), g));
    r.record(
        "coproduct-dagger",
        "starfrob",
        all_basis(d, |i| {
            let b = h.basis(i);
            expect_eq(&h.space, 2, "Δ*", &f.delta.apply(&star.apply(&b)), &st.dagger(h, &f.delta.apply(&b)))
        }),
    );
    r.record(
        "counit-conj",
        "starfrob",
        all_basis(d, |i| {
            let b = h.basis(i);
            let (l, rr) = (f.counit.apply(&star.apply(&b)).coeff(0, h.order()), f.counit.apply(&b).coeff(0, h.order()).conj());
            if l == rr {
                Ok(())
            } else {
                Err(format!("ε({}*) = {l} vs {rr}", h.space.label(i)))
            }
        }),
    );
    r
}

/// ⟨a|b⟩ = (a*, b) on basis pairs, for inspection; positivity is not decided.
pub fn gram_matrix(f: &FrobeniusAlgebra, star: &AntiLinear) -> Matrix {
    let d = f.dim();
    let mut m = Matrix::zero(f.order(), d, d);
    for a in 0..d {
        let sa = star.apply(&f.basis(a));
        for b in 0..d {
            m.set(a, b, f.pair(&sa, &f.basis(b)));
        }
    }
    m
}

/// The unimodular case: ∫* = conj∫ and Λ* = Λ; the green product is then a
/// *-algebra and the red coproduct is compatible with †.
pub fn check_unimodular_star(b: &FHopfBundle, star: &AntiLinear) -> Report {
    let mut r = Report::new();
    let h = &b.base;
    let st = StarStructure::new(h, star.clone());
    let d = h.dim();
    r.record(
        "integral-star",
        "corbasicHH*",
        all_basis(d, |i| {
            let x = h.basis(i);
            let (l, rr) = (b.integrals.eval(&star.apply(&x)), b.integrals.eval(&x).conj());
            if l == rr {
                Ok(())
            } else {
                Err(format!("∫({}*) = {l} vs {rr}", h.space.label(i)))
            }
        }),
    );
    let lambda = b.integrals.lambda_element();
    r.record("lambda-star", "corbasicHH*", expect_eq(&h.space, 1, "Λ*", &star.apply(lambda), lambda));
    r.record("green-antimultiplicative", "corbasicHH*", antimultiplicative(h, &b.green.mu, star));
    r.record(
        "red-coproduct-dagger",
        "corbasicHH*",
        all_basis(d, |i| {
            let x = h.basis(i);
            expect_eq(&h.space, 2, "Δ_r*", &b.red_coproduct(&star.apply(&x)), &st.dagger(h, &b.red_coproduct(&x)))
        }),
    );
    r
}

/// Green star S̃⁻¹∘θ.
pub fn green_star(b: &FHopfBundle, st: &StarStructure) -> AntiLinear {
    st.theta.then_linear(&b.associated.antipode_inv).expect("arity")
}

/// The general (non-unimodular) case.
pub fn check_general_star(b: &FHopfBundle, star: &AntiLinear) -> Report {
    let mut r = Report::new();
    let h = &b.base;
    let st = StarStructure::new(h, star.clone());
    let d = h.dim();
    r.record(
        "integral-star",
        "intstar",
        all_basis(d, |i| {
            let x = h.basis(i);
            let (l, rr) = (b.integrals.eval(&star.apply(&x)), b.integrals.eval(&h.s(&x)).conj());
            if l == rr {
                Ok(())
            } else {
                Err(format!("∫({}*) = {l} vs conj(∫S·) = {rr}", h.space.label(i)))
            }
        }),
    );
    let lambda = b.integrals.lambda_element();
    r.record("lambda-star", "intstar", expect_eq(&h.space, 1, "Λ*", &star.apply(lambda), &h.s(lambda)));
    let g = b.red.metric.as_element();
    let tt = st.theta.tensor(&st.theta).expect("arity");
    r.record("theta-metric", "intstar", expect_eq(&h.space, 2, "(θ⊗θ)g_r", &tt.apply(g), g));
    r.record("form-theta", "intstar", {
        let mut res = Ok(());
        'o: for a in 0..d {
            let ta = st.theta.apply(&h.basis(a));
            for c in 0..d {
                let lhs = b.red.pair(&h.basis(a), &h.basis(c)).conj();
                let rhs = b.red.pair(&ta, &st.theta.apply(&h.basis(c)));
                if lhs != rhs {
                    res = Err(format!("conj(({}, {})_r) = {lhs} vs {rhs}", h.space.label(a), h.space.label(c)));
                    break 'o;
                }
            }
        }
        res
    });
    let s2 = h.antipode.compose(&h.antipode).expect("arity");
    let ts2 = b.tilde_s.compose(&b.tilde_s).expect("arity");
    r.record("S2-tildeS2", "propflipHH*", s2.diff(&ts2).map_or(Ok(()), Err));
    let gs = green_star(b, &st);
    r.record("green-star-involutive", "propflipHH*", involutive(h, &gs));
    r.merge_prefixed("green-flip", check_flip_star(&b.associated, &gs));
    let green_theta = gs.then_linear(&b.associated.antipode).expect("arity");
    r.record("green-theta", "propflipHH*", green_theta.0.diff(&st.theta.0).map_or(Ok(()), Err));
    r
}

/// 𝓡† = 𝓡⁻¹ with † = flip∘(*⊗*).
pub fn check_rmatrix_dagger(h: &HopfData, star: &AntiLinear) -> Result<(), String> {
    let rm = h.rmatrix.as_ref().ok_or("no R-matrix")?;
    let st = StarStructure::new(h, star.clone());
    let dag = st.dagger(h, rm);
    let inv = crate::hopf::rmatrix_inverse(h, rm);
    expect_eq(&h.space, 2, "𝓡†", &dag, &inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fhopf, models};

    #[test]
    fn kx_flip_and_unimodular() {
        let m = models::build("kX:S3").unwrap();
        let star = m.star.clone().unwrap();
        assert!(check_flip_star(&m.hopf, &star).all_passed());
        let b = fhopf::amplify(&m.hopf, &m.integrals).unwrap();
        let r = check_unimodular_star(&b, &star);
        assert!(r.all_passed(), "{r:?}");
        let gram = gram_matrix(&b.red, &star);
        assert_eq!(gram, Matrix::identity(1, 6));
    }

    #[test]
    fn u_minus_one_theta() {
        let m = models::build("uqsl2:2").unwrap();
        let star = m.star.clone().unwrap();
        let r = check_flip_star(&m.hopf, &star);
        assert!(r.all_passed(), "{r:?}");
        let st = StarStructure::new(&m.hopf, star);
        let e = m.element("K^0 F^0 E^1").unwrap();
        let kf = m.element("K^1 F^1 E^0").unwrap();
        assert_eq!(st.theta.apply(&e), kf.neg());
    }

    #[test]
    fn uqsl2_3_star() {
        let m = models::build("uqsl2:3").unwrap();
        let star = m.star.clone().unwrap();
        assert!(check_flip_star(&m.hopf, &star).all_passed());
        assert!(check_rmatrix_dagger(&m.hopf, &star).is_ok());
        let b = fhopf::amplify(&m.hopf, &m.integrals).unwrap();
        assert!(!check_frobenius_star(&m.hopf, &b.red, &star).passed("metric-dagger"));
        let r = check_general_star(&b, &star);
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}
