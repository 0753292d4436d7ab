//! Exact arithmetic in the cyclotomic field Q(q) = Q[q]/Phi_n(q).
//!
//! Elements are stored in the power basis 1, q, ..., q^{phi(n)-1} with a single
//! positive common denominator. Small values use machine integers; anything that
//! would overflow is promoted to big integers and demoted again when it fits.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

/// Largest supported root-of-unity order.
pub const MAX_ORDER: u32 = 128;

// Bound on stored machine coefficients; leaves headroom for i128 intermediates.
const SMALL_LIMIT: i128 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed root-of-unity orders {0} and {1}")]
    MixedOrder(u32, u32),
    #[error("unsupported root-of-unity order {0} (must be 1..={max})", max = MAX_ORDER)]
    BadOrder(u32),
    #[error("cannot parse scalar {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

struct Field {
    n: u32,
    phi: usize,
    /// Coefficients of Phi_n, lowest degree first (monic, length phi+1).
    cyclo: Vec<i64>,
    /// powers[k] = q^k reduced, for 0 <= k < n.
    powers: Vec<Vec<i64>>,
}

#[allow(clippy::declare_interior_mutable_const)]
const EMPTY: OnceLock<Field> = OnceLock::new();
static FIELDS: [OnceLock<Field>; MAX_ORDER as usize + 1] = [EMPTY; MAX_ORDER as usize + 1];

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let lead = den[dl - 1];
    let mut quot = vec![0i128; num.len() + 1 - dl];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dl - 1] / lead;
        quot[i] = c;
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|r| *r == 0));
    quot
}

fn cyclotomic(n: u32) -> Vec<i128> {
    let mut p = vec![0i128; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_exact(&p, &cyclotomic(d));
        }
    }
    p
}

fn field(n: u32) -> &'static Field {
    assert!((1..=MAX_ORDER).contains(&n), "unsupported root-of-unity order {n}");
    FIELDS[n as usize].get_or_init(|| {
        let cyc = cyclotomic(n);
        let phi = cyc.len() - 1;
        let cyclo: Vec<i64> = cyc.iter().map(|c| i64::try_from(*c).unwrap()).collect();
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by q and reduce with the monic relation
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            for i in (1..phi).rev() {
                next[i] = cur[i - 1];
            }
            for (i, slot) in next.iter_mut().enumerate() {
                *slot -= top * cyclo[i];
            }
            cur = next;
        }
        Field { n, phi, cyclo, powers }
    })
}

/// Euler totient of `n`, i.e. the degree of Q(q) over Q.
pub fn totient(n: u32) -> usize {
    field(n).phi
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(SmallVec<[i64; 4]>, i64),
    Big(Vec<BigInt>, BigInt),
}

/// An exact element of Q(q), q a primitive n-th root of unity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycScalar {
    n: u32,
    repr: Repr,
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn fits(x: i128) -> bool {
    -SMALL_LIMIT < x && x < SMALL_LIMIT
}

impl CycScalar {
    fn from_i128(n: u32, mut num: SmallVec<[i128; 4]>, mut den: i128) -> CycScalar {
        debug_assert!(den != 0);
        if den < 0 {
            den = -den;
            for c in num.iter_mut() {
                *c = -*c;
            }
        }
        if num.iter().all(|c| *c == 0) {
            return CycScalar::zero(n);
        }
        let mut g = den;
        for c in num.iter() {
            if g == 1 {
                break;
            }
            g = gcd_i128(g, *c);
        }
        if g > 1 {
            den /= g;
            for c in num.iter_mut() {
                *c /= g;
            }
        }
        if fits(den) && num.iter().all(|c| fits(*c)) {
            CycScalar { n, repr: Repr::Small(num.iter().map(|c| *c as i64).collect(), den as i64) }
        } else {
            CycScalar {
                n,
                repr: Repr::Big(num.iter().map(|c| BigInt::from(*c)).collect(), BigInt::from(den)),
            }
        }
    }

    fn from_big(n: u32, mut num: Vec<BigInt>, mut den: BigInt) -> CycScalar {
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        if num.iter().all(|c| c.is_zero()) {
            return CycScalar::zero(n);
        }
        let mut g = den.clone();
        for c in num.iter() {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            den /= &g;
            for c in num.iter_mut() {
                *c /= &g;
            }
        }
        let small_den = den.to_i128().filter(|d| fits(*d));
        let small_num: Option<SmallVec<[i64; 4]>> = num
            .iter()
            .map(|c| c.to_i128().filter(|x| fits(*x)).map(|x| x as i64))
            .collect();
        match (small_num, small_den) {
            (Some(sn), Some(sd)) => CycScalar { n, repr: Repr::Small(sn, sd as i64) },
            _ => CycScalar { n, repr: Repr::Big(num, den) },
        }
    }

    fn to_big(&self) -> (Vec<BigInt>, BigInt) {
        match &self.repr {
            Repr::Small(num, den) => (num.iter().map(|c| BigInt::from(*c)).collect(), BigInt::from(*den)),
            Repr::Big(num, den) => (num.clone(), den.clone()),
        }
    }

    pub fn zero(n: u32) -> CycScalar {
        let phi = field(n).phi;
        CycScalar { n, repr: Repr::Small(SmallVec::from_elem(0, phi), 1) }
    }

    pub fn one(n: u32) -> CycScalar {
        CycScalar::from_int(n, 1)
    }

    pub fn from_int(n: u32, v: i64) -> CycScalar {
        CycScalar::from_ratio(n, v, 1)
    }

    pub fn from_ratio(n: u32, p: i64, r: i64) -> CycScalar {
        assert!(r != 0, "zero denominator");
        let phi = field(n).phi;
        let mut num: SmallVec<[i128; 4]> = SmallVec::from_elem(0, phi);
        num[0] = p as i128;
        CycScalar::from_i128(n, num, r as i128)
    }

    pub fn from_rational(n: u32, r: &BigRational) -> CycScalar {
        let phi = field(n).phi;
        let mut num = vec![BigInt::zero(); phi];
        num[0] = r.numer().clone();
        CycScalar::from_big(n, num, r.denom().clone())
    }

    /// Builds sum_k coeffs[k] q^k for arbitrary length (reduced mod Phi_n).
    pub fn from_poly(n: u32, coeffs: &[BigRational]) -> CycScalar {
        let f = field(n);
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut num = vec![BigInt::zero(); f.phi];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let scaled = c.numer() * (&den / c.denom());
            for (t, p) in f.powers[k % f.n as usize].iter().enumerate() {
                if *p != 0 {
                    num[t] += &scaled * *p;
                }
            }
        }
        CycScalar::from_big(n, num, den)
    }

    /// q^k for any integer k (negative allowed).
    pub fn q_pow(n: u32, k: i64) -> CycScalar {
        let f = field(n);
        let idx = k.rem_euclid(n as i64) as usize;
        let num: SmallVec<[i128; 4]> = f.powers[idx].iter().map(|c| *c as i128).collect();
        CycScalar::from_i128(n, num, 1)
    }

    pub fn q(n: u32) -> CycScalar {
        CycScalar::q_pow(n, 1)
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small(num, _) => num.iter().all(|c| *c == 0),
            Repr::Big(..) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Small(num, den) => *den == 1 && num[0] == 1 && num[1..].iter().all(|c| *c == 0),
            Repr::Big(..) => false,
        }
    }

    /// Power-basis coefficients as rationals (length phi(n)).
    pub fn coeffs(&self) -> Vec<BigRational> {
        let (num, den) = self.to_big();
        num.into_iter().map(|c| BigRational::new(c, den.clone())).collect()
    }

    /// Returns the value if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        let c = self.coeffs();
        if c[1..].iter().all(|x| x.is_zero()) {
            Some(c[0].clone())
        } else {
            None
        }
    }

    fn check_order(&self, other: &CycScalar) -> Result<(), ScalarError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(ScalarError::MixedOrder(self.n, other.n))
        }
    }

    pub fn try_add(&self, other: &CycScalar) -> Result<CycScalar, ScalarError> {
        self.check_order(other)?;
        Ok(self.add_same(other, false))
    }

    pub fn try_sub(&self, other: &CycScalar) -> Result<CycScalar, ScalarError> {
        self.check_order(other)?;
        Ok(self.add_same(other, true))
    }

    pub fn try_mul(&self, other: &CycScalar) -> Result<CycScalar, ScalarError> {
        self.check_order(other)?;
        Ok(self.mul_same(other))
    }

    pub fn try_div(&self, other: &CycScalar) -> Result<CycScalar, ScalarError> {
        self.check_order(other)?;
        Ok(self.mul_same(&other.inv()?))
    }

    fn add_same(&self, other: &CycScalar, negate: bool) -> CycScalar {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other.clone() } else { other.clone() };
        }
        if let (Repr::Small(a, da), Repr::Small(b, db)) = (&self.repr, &other.repr) {
            let (da, db) = (*da as i128, *db as i128);
            let g = gcd_i128(da, db);
            let l = da / g * db;
            let (fa, fb) = (l / da, if negate { -(l / db) } else { l / db });
            let num: SmallVec<[i128; 4]> =
                a.iter().zip(b.iter()).map(|(x, y)| *x as i128 * fa + *y as i128 * fb).collect();
            return CycScalar::from_i128(self.n, num, l);
        }
        let (a, da) = self.to_big();
        let (b, db) = other.to_big();
        let l = da.lcm(&db);
        let fa = &l / &da;
        let mut fb = &l / &db;
        if negate {
            fb = -fb;
        }
        let num = a.iter().zip(b.iter()).map(|(x, y)| x * &fa + y * &fb).collect();
        CycScalar::from_big(self.n, num, l)
    }

    fn mul_small(&self, a: &[i64], da: i64, b: &[i64], db: i64) -> Option<CycScalar> {
        let f = field(self.n);
        let phi = f.phi;
        let den = (da as i128).checked_mul(db as i128)?;
        let mut out: SmallVec<[i128; 4]> = SmallVec::from_elem(0, phi);
        if phi == 1 {
            out[0] = (a[0] as i128).checked_mul(b[0] as i128)?;
            return Some(CycScalar::from_i128(self.n, out, den));
        }
        let mut conv: SmallVec<[i128; 8]> = SmallVec::from_elem(0, 2 * phi - 1);
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if *y == 0 {
                    continue;
                }
                conv[i + j] = conv[i + j].checked_add((*x as i128).checked_mul(*y as i128)?)?;
            }
        }
        for (k, c) in conv.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if k < phi {
                out[k] = out[k].checked_add(*c)?;
            } else {
                for (t, p) in f.powers[k % f.n as usize].iter().enumerate() {
                    if *p != 0 {
                        out[t] = out[t].checked_add(c.checked_mul(*p as i128)?)?;
                    }
                }
            }
        }
        Some(CycScalar::from_i128(self.n, out, den))
    }

    fn mul_same(&self, other: &CycScalar) -> CycScalar {
        if self.is_zero() || other.is_zero() {
            return CycScalar::zero(self.n);
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        if let (Repr::Small(a, da), Repr::Small(b, db)) = (&self.repr, &other.repr) {
            if let Some(r) = self.mul_small(a, *da, b, *db) {
                return r;
            }
        }
        let f = field(self.n);
        let (a, da) = self.to_big();
        let (b, db) = other.to_big();
        let mut conv = vec![BigInt::zero(); 2 * f.phi - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    conv[i + j] += x * y;
                }
            }
        }
        let mut out = vec![BigInt::zero(); f.phi];
        for (k, c) in conv.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (t, p) in f.powers[k % f.n as usize].iter().enumerate() {
                if *p != 0 {
                    out[t] += c * *p;
                }
            }
        }
        CycScalar::from_big(self.n, out, da * db)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Phi_n.
    pub fn inv(&self) -> Result<CycScalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let f = field(self.n);
        let coeffs = self.coeffs();
        if coeffs[1..].iter().all(|c| c.is_zero()) {
            return Ok(CycScalar::from_rational(self.n, &coeffs[0].recip()));
        }
        let modulus: Vec<BigRational> =
            f.cyclo.iter().map(|c| BigRational::from_integer(BigInt::from(*c))).collect();
        let s = poly_inverse_mod(&coeffs, &modulus).ok_or(ScalarError::DivisionByZero)?;
        Ok(CycScalar::from_poly(self.n, &s))
    }

    /// Galois conjugation q -> q^{-1} (complex conjugation for |q| = 1).
    pub fn conj(&self) -> CycScalar {
        let f = field(self.n);
        if f.phi == 1 {
            return self.clone();
        }
        let n = f.n as usize;
        if let Repr::Small(a, da) = &self.repr {
            let mut out: SmallVec<[i128; 4]> = SmallVec::from_elem(0, f.phi);
            let mut ok = true;
            'outer: for (k, c) in a.iter().enumerate() {
                if *c == 0 {
                    continue;
                }
                for (t, p) in f.powers[(n - k) % n].iter().enumerate() {
                    match out[t].checked_add(*c as i128 * *p as i128) {
                        Some(v) => out[t] = v,
                        None => {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            if ok {
                return CycScalar::from_i128(self.n, out, *da as i128);
            }
        }
        let (a, da) = self.to_big();
        let mut out = vec![BigInt::zero(); f.phi];
        for (k, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (t, p) in f.powers[(n - k) % n].iter().enumerate() {
                if *p != 0 {
                    out[t] += c * *p;
                }
            }
        }
        CycScalar::from_big(self.n, out, da)
    }

    pub fn pow(&self, e: i64) -> Result<CycScalar, ScalarError> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycScalar::one(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Canonical text form, e.g. `1 + -2/3*q + q^2`... with every term joined by " + ".
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Parses the canonical text form (and a slightly more liberal superset).
    pub fn parse(n: u32, text: &str) -> Result<CycScalar, ScalarError> {
        if !(1..=MAX_ORDER).contains(&n) {
            return Err(ScalarError::BadOrder(n));
        }
        ScalarParser { text, pos: 0, n }.parse()
    }
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_is_zero(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    if rem.len() < b.len() {
        return (vec![BigRational::zero()], rem);
    }
    let lead = b.last().unwrap().clone();
    let mut quot = vec![BigRational::zero(); rem.len() + 1 - b.len()];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + b.len() - 1] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, d) in b.iter().enumerate() {
            let t = &c * d;
            rem[i + j] -= t;
        }
        quot[i] = c;
    }
    poly_trim(&mut rem);
    (quot, rem)
}

fn poly_sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().max(q.len() + b.len() - 1);
    let mut out = vec![BigRational::zero(); len];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, x) in q.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] -= x * y;
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    // invariant: s_i * a == r_i (mod m)
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    poly_trim(&mut r1);
    let (mut s0, mut s1) = (vec![BigRational::zero()], vec![BigRational::one()]);
    while !poly_is_zero(&r1) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if r0.len() != 1 || r0[0].is_zero() {
        return None;
    }
    let c = r0[0].recip();
    Some(s0.into_iter().map(|x| x * &c).collect())
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_integer() {
                write!(f, "{}", c.numer())?;
            } else {
                write!(f, "{}/{}", c.numer(), c.denom())?;
            }
            match k {
                0 => {}
                1 => write!(f, "*q")?,
                _ => write!(f, "*q^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct ScalarParser<'a> {
    text: &'a str,
    pos: usize,
    n: u32,
}

impl ScalarParser<'_> {
    fn err(&self, reason: &str) -> ScalarError {
        ScalarError::Parse { text: self.text.to_string(), reason: format!("{reason} at byte {}", self.pos) }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += self.peek().unwrap().len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            None
        } else {
            self.text[start..self.pos].parse().ok()
        }
    }

    fn signed_exponent(&mut self) -> Result<i64, ScalarError> {
        let neg = self.eat('-');
        let v = self.integer().ok_or_else(|| self.err("expected exponent"))?;
        let v = v.to_i64().ok_or_else(|| self.err("exponent too large"))?;
        Ok(if neg { -v } else { v })
    }

    fn parse(mut self) -> Result<CycScalar, ScalarError> {
        let mut acc = CycScalar::zero(self.n);
        let mut first = true;
        loop {
            self.skip_ws();
            if self.pos == self.text.len() {
                if first {
                    return Err(self.err("empty input"));
                }
                return Ok(acc);
            }
            let mut negate = false;
            if !first {
                if self.eat('-') {
                    negate = true;
                } else if !self.eat('+') {
                    return Err(self.err("expected '+' or '-'"));
                }
            }
            first = false;
            loop {
                if self.eat('-') {
                    negate = !negate;
                } else if !self.eat('+') {
                    break;
                }
            }
            let mut term = self.term()?;
            if negate {
                term = -term;
            }
            acc = &acc + &term;
        }
    }

    fn term(&mut self) -> Result<CycScalar, ScalarError> {
        let coeff = match self.integer() {
            Some(p) => {
                let mut r = BigRational::from_integer(p);
                if self.eat('/') {
                    let d = self.integer().ok_or_else(|| self.err("expected denominator"))?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    r /= BigRational::from_integer(d);
                }
                let c = CycScalar::from_rational(self.n, &r);
                if !self.eat('*') {
                    return Ok(c);
                }
                c
            }
            None => CycScalar::one(self.n),
        };
        if !self.eat('q') {
            return Err(self.err("expected 'q' or a number"));
        }
        let e = if self.eat('^') { self.signed_exponent()? } else { 1 };
        Ok(&coeff * &CycScalar::q_pow(self.n, e))
    }
}

impl FromStr for CycScalar {
    type Err = ScalarError;

    /// Accepts `n:text`, the order prefixed to the canonical form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, rest) = s.split_once(':').ok_or_else(|| ScalarError::Parse {
            text: s.to_string(),
            reason: "expected '<order>:<value>'".into(),
        })?;
        let n: u32 = n.trim().parse().map_err(|_| ScalarError::Parse {
            text: s.to_string(),
            reason: "bad order".into(),
        })?;
        CycScalar::parse(n, rest)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&CycScalar> for &CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                assert_eq!(self.n, rhs.n, "mixed root-of-unity orders");
                $body(self, rhs)
            }
        }
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<CycScalar> for &CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &CycScalar, b: &CycScalar| a.add_same(b, false));
binop!(Sub, sub, |a: &CycScalar, b: &CycScalar| a.add_same(b, true));
binop!(Mul, mul, |a: &CycScalar, b: &CycScalar| a.mul_same(b));

impl AddAssign<&CycScalar> for CycScalar {
    fn add_assign(&mut self, rhs: &CycScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycScalar> for CycScalar {
    fn sub_assign(&mut self, rhs: &CycScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycScalar> for CycScalar {
    fn mul_assign(&mut self, rhs: &CycScalar) {
        *self = &*self * rhs;
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        match self.repr {
            Repr::Small(num, den) => {
                CycScalar { n: self.n, repr: Repr::Small(num.iter().map(|c| -c).collect(), den) }
            }
            Repr::Big(num, den) => CycScalar { n: self.n, repr: Repr::Big(num.into_iter().map(|c| -c).collect(), den) },
        }
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -self.clone()
    }
}

/// The q-integer [m]_q = 1 + q + ... + q^{m-1}.
pub fn qint(n: u32, m: u32) -> CycScalar {
    let mut acc = CycScalar::zero(n);
    for k in 0..m {
        acc += &CycScalar::q_pow(n, k as i64);
    }
    acc
}

/// [m]_q! = [1]_q [2]_q ... [m]_q.
pub fn qfact(n: u32, m: u32) -> CycScalar {
    (1..=m).fold(CycScalar::one(n), |acc, k| &acc * &qint(n, k))
}

/// Gaussian binomial via q-factorials; `None` when a denominator vanishes.
pub fn qbinom_factorial(n: u32, m: u32, r: u32) -> Option<CycScalar> {
    if r > m {
        return Some(CycScalar::zero(n));
    }
    let den = &qfact(n, r) * &qfact(n, m - r);
    den.inv().ok().map(|d| &qfact(n, m) * &d)
}

/// Gaussian binomial via the q-Pascal rule [m,r] = [m-1,r-1] + q^r [m-1,r].
pub fn qbinom_pascal(n: u32, m: u32, r: u32) -> CycScalar {
    if r > m {
        return CycScalar::zero(n);
    }
    let mut row = vec![CycScalar::one(n)];
    for k in 1..=m as usize {
        let mut next = vec![CycScalar::one(n); k + 1];
        for j in 1..k {
            next[j] = &row[j - 1] + &(&CycScalar::q_pow(n, j as i64) * &row[j]);
        }
        row = next;
    }
    row.swap_remove(r as usize)
}

/// Gaussian binomial coefficient, well defined at every root of unity.
pub fn qbinom(n: u32, m: u32, r: u32) -> CycScalar {
    qbinom_factorial(n, m, r).unwrap_or_else(|| qbinom_pascal(n, m, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: u32, t: &str) -> CycScalar {
        CycScalar::parse(n, t).unwrap()
    }

    #[test]
    fn products_past_degree_n_wrap() {
        assert_eq!(&CycScalar::q_pow(5, 3) * &CycScalar::q_pow(5, 3), CycScalar::q_pow(5, 1));
        let x = s(5, "1+q+q^2+q^3");
        assert_eq!(&x * &x, CycScalar::q_pow(5, 3));
        let y = s(7, "q^5+q^4");
        assert_eq!(&y * &y, s(7, "q^3+2*q^2+q"));
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(field(1).cyclo, vec![-1, 1]);
        assert_eq!(field(2).cyclo, vec![1, 1]);
        assert_eq!(field(3).cyclo, vec![1, 1, 1]);
        assert_eq!(field(4).cyclo, vec![1, 0, 1]);
        assert_eq!(field(8).cyclo, vec![1, 0, 0, 0, 1]);
        assert_eq!(field(12).cyclo, vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(5), 4);
        assert_eq!(totient(105), 48);
    }

    #[test]
    fn root_of_unity_identities() {
        let q = CycScalar::q(3);
        assert!((&q * &CycScalar::q_pow(3, 2)).is_one());
        assert_eq!(CycScalar::q(2), CycScalar::from_int(2, -1));
        assert!(CycScalar::q(1).is_one());
        assert_eq!(s(3, "1 + q").conj(), s(3, "1 + q^2"));
        assert_eq!(s(3, "1 + q^2"), s(3, "-q"));
    }

    #[test]
    fn inverse_of_one_minus_q() {
        let a = s(3, "1 - q");
        let b = a.inv().unwrap();
        // oracle: (1-q)(1-q^2) = 2 - q - q^2 = 3, so the inverse is (1-q^2)/3
        assert_eq!(b, s(3, "1/3 - 1/3*q^2"));
        assert!((&a * &b).is_one());
        assert_eq!(CycScalar::zero(3).inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn mixed_orders_rejected() {
        let e = CycScalar::one(3).try_add(&CycScalar::one(4));
        assert_eq!(e, Err(ScalarError::MixedOrder(3, 4)));
    }

    #[test]
    fn q_integers() {
        assert_eq!(qint(5, 2), s(5, "1 + q"));
        assert!(qint(3, 0).is_zero());
        assert!(qint(3, 1).is_one());
        for n in 2..9 {
            assert!(qint(n, n).is_zero());
            // [n-1]_{q^-1} = -q by the geometric sum
            assert_eq!(qint(n, n - 1).conj(), -CycScalar::q(n));
        }
    }

    #[test]
    fn binomials_at_roots_of_unity() {
        assert!(qbinom(3, 3, 1).is_zero());
        assert!(qbinom_factorial(3, 4, 3).is_none());
        assert!(qbinom(3, 4, 3).is_one());
        assert_eq!(qbinom(3, 2, 1), s(3, "1 + q"));
        assert_eq!(qbinom(4, 4, 2), qbinom_pascal(4, 4, 2));
    }

    #[test]
    fn render_format() {
        assert_eq!(s(3, "0").to_string(), "0");
        assert_eq!(s(3, "1 - q").to_string(), "1 + -1*q");
        assert_eq!(s(5, "q^3 + 2/3").to_string(), "2/3 + 1*q^3");
        assert_eq!("3:1 + q^2".parse::<CycScalar>().unwrap(), -CycScalar::q(3));
        assert!(CycScalar::parse(3, "1 +").is_err());
        assert!(CycScalar::parse(3, "1/0").is_err());
        assert!(CycScalar::parse(0, "1").is_err());
    }

    #[test]
    fn big_promotion_and_demotion() {
        let big = CycScalar::from_int(5, 1 << 61);
        let sq = &big * &big;
        assert!(matches!(sq.repr, Repr::Big(..)));
        let back = sq.try_div(&big).unwrap();
        assert_eq!(back, big);
        assert!(matches!(back.repr, Repr::Small(..)));
        assert_eq!(CycScalar::parse(5, &sq.to_string()).unwrap(), sq);
    }
}
