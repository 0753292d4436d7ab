//! Element expressions such as `(1+K)E F - q^-1 K^2 ⊗ E`.
//!
//! Grammar, loosest first:
//!
//! ```text
//! sum     := ["+"|"-"] tensor (("+"|"-") tensor)*
//! tensor  := product ("⊗" product)*
//! product := power (["*"|"·"|"∘"] power | "/" nat)*
//! power   := atom ("^" ["-"] nat)?
//! atom    := nat | "q" | name | "[" label "]" | "(" sum ")"
//! name    := letter ("_" (alnum+ | "{" .. "}"))?
//! ```
//!
//! Juxtaposition and `*`/`·` use the base product; `∘` uses the secondary
//! product when one is bound (the green product of a bundle). Offsets in
//! errors are 1-based character positions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::hopf::{invert_element, HopfData};
use crate::scalar::CycScalar;
use crate::tensor::{Index, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at offset {offset}: {message}")]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

/// A parsed value: coefficients in H^{⊗arity}.
#[derive(Clone, Debug, PartialEq)]
pub struct Value {
    pub vector: Vector,
    pub arity: usize,
}

pub struct Env<'a> {
    pub hopf: &'a HopfData,
    names: BTreeMap<String, Vector>,
    circ: Option<Box<dyn Fn(&Vector, &Vector) -> Vector + 'a>>,
}

impl<'a> Env<'a> {
    /// Basis labels are reachable as `[label]`; generators by name.
    pub fn new(hopf: &'a HopfData) -> Env<'a> {
        Env { hopf, names: BTreeMap::new(), circ: None }
    }

    pub fn bind(&mut self, name: &str, v: Vector) -> &mut Self {
        self.names.insert(name.to_string(), v);
        self
    }

    pub fn with_circ(mut self, f: impl Fn(&Vector, &Vector) -> Vector + 'a) -> Env<'a> {
        self.circ = Some(Box::new(f));
        self
    }

    pub fn eval(&self, text: &str) -> Result<Value, ExprError> {
        let mut p = Parser { env: self, chars: text.chars().collect(), pos: 0 };
        let v = p.sum()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
        }
        Ok(v)
    }

    /// Parses an element of H itself.
    pub fn element(&self, text: &str) -> Result<Vector, ExprError> {
        let v = self.eval(text)?;
        if v.arity != 1 {
            return Err(ExprError { offset: 1, message: format!("expected an element of H, got arity {}", v.arity) });
        }
        Ok(v.vector)
    }

    fn order(&self) -> u32 {
        self.hopf.order()
    }

    fn scalar(&self, c: CycScalar) -> Value {
        Value { vector: self.hopf.one().scale(&c), arity: 1 }
    }
}

struct Parser<'e, 'a> {
    env: &'e Env<'a>,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_, '_> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError { offset: self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn is_minus(c: char) -> bool {
        c == '-' || c == '−'
    }

    fn sum(&mut self) -> Result<Value, ExprError> {
        let negate = match self.peek() {
            Some(c) if Self::is_minus(c) => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = self.tensor()?;
        if negate {
            acc.vector = acc.vector.neg();
        }
        loop {
            let start = self.pos;
            let sign = match self.peek() {
                Some('+') => false,
                Some(c) if Self::is_minus(c) => true,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.tensor()?;
            if rhs.arity != acc.arity {
                self.pos = start;
                return Err(self.error(format!("adding arity {} to arity {}", rhs.arity, acc.arity)));
            }
            acc.vector = if sign { acc.vector.sub(&rhs.vector) } else { acc.vector.add(&rhs.vector) };
        }
    }

    fn tensor(&mut self) -> Result<Value, ExprError> {
        let mut acc = self.product()?;
        while self.eat('⊗') {
            let rhs = self.product()?;
            let size = (self.env.hopf.dim() as Index).pow(rhs.arity as u32);
            acc = Value { vector: acc.vector.tensor(&rhs.vector, size), arity: acc.arity + rhs.arity };
        }
        Ok(acc)
    }

    fn starts_atom(c: char) -> bool {
        c.is_ascii_digit() || c.is_alphabetic() || c == '(' || c == '['
    }

    fn product(&mut self) -> Result<Value, ExprError> {
        let mut acc = self.power()?;
        loop {
            let start = self.pos;
            let circ = match self.peek() {
                Some('*') | Some('·') => {
                    self.pos += 1;
                    false
                }
                Some('∘') => {
                    self.pos += 1;
                    true
                }
                Some('/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let rhs = self.power()?;
                    let one = self.env.hopf.one();
                    let c = match rhs.vector.ratio_to(one) {
                        Some(c) if rhs.arity == 1 && rhs.vector == one.scale(&c) => c,
                        _ if rhs.arity == 1 && rhs.vector.is_zero() => {
                            self.pos = at;
                            return Err(self.error("division by zero"));
                        }
                        _ => {
                            self.pos = at;
                            return Err(self.error("divisor must be a scalar"));
                        }
                    };
                    let inv = c.inv().map_err(|_| {
                        self.pos = at;
                        self.error("divisor is not invertible")
                    })?;
                    acc.vector = acc.vector.scale(&inv);
                    continue;
                }
                Some(c) if Self::starts_atom(c) => false,
                _ => return Ok(acc),
            };
            let rhs = self.power()?;
            if acc.arity != 1 || rhs.arity != 1 {
                self.pos = start;
                return Err(self.error("products are only defined on H; use ⊗ for tensors"));
            }
            acc.vector = if circ {
                match &self.env.circ {
                    Some(f) => f(&acc.vector, &rhs.vector),
                    None => {
                        self.pos = start;
                        return Err(self.error("no secondary product bound for '∘'"));
                    }
                }
            } else {
                self.env.hopf.mul(&acc.vector, &rhs.vector)
            };
        }
    }

    fn nat(&mut self) -> Result<u64, ExprError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| ExprError { offset: start + 1, message: "number too large".into() })
    }

    fn power(&mut self) -> Result<Value, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let neg = match self.chars.get(self.pos) {
            Some(&c) if Self::is_minus(c) => {
                self.pos += 1;
                true
            }
            _ => false,
        };
        self.skip_ws();
        let start = self.pos;
        let e = self.nat()?;
        if e > 1 << 16 {
            self.pos = start;
            return Err(self.error("exponent too large"));
        }
        if base.arity != 1 {
            return Err(self.error("powers are only defined on H"));
        }
        let h = self.env.hopf;
        let mut b = base.vector;
        if neg {
            b = invert_element(h, &b, 1).map_err(|e| ExprError { offset: start, message: e.to_string() })?;
        }
        let mut acc = h.one().clone();
        for _ in 0..e {
            acc = h.mul(&acc, &b);
        }
        Ok(Value { vector: acc, arity: 1 })
    }

    fn atom(&mut self) -> Result<Value, ExprError> {
        let env = self.env;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(v)
            }
            Some('[') => {
                self.pos += 1;
                let start = self.pos;
                let mut depth = 0usize;
                while let Some(&c) = self.chars.get(self.pos) {
                    match c {
                        '[' => depth += 1,
                        ']' if depth == 0 => break,
                        ']' => depth -= 1,
                        _ => {}
                    }
                    self.pos += 1;
                }
                if self.pos >= self.chars.len() {
                    return Err(self.error("expected ']'"));
                }
                let label: String = self.chars[start..self.pos].iter().collect();
                self.pos += 1;
                match env.hopf.space.index_of(label.trim()) {
                    Some(i) => Ok(Value { vector: env.hopf.basis(i), arity: 1 }),
                    None => Err(ExprError { offset: start + 1, message: format!("unknown basis label '{}'", label.trim()) }),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.nat()?;
                Ok(env.scalar(CycScalar::from_int(env.order(), v as i64)))
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                let name = self.name();
                if name == "q" {
                    return Ok(env.scalar(CycScalar::q_pow(env.order(), 1)));
                }
                if let Some(v) = env.names.get(&name) {
                    return Ok(Value { vector: v.clone(), arity: 1 });
                }
                if name == "Λ" {
                    return Err(ExprError { offset: start + 1, message: "Λ is not bound".into() });
                }
                match env.hopf.space.index_of(&name) {
                    Some(i) => Ok(Value { vector: env.hopf.basis(i), arity: 1 }),
                    None => Err(ExprError { offset: start + 1, message: format!("unknown name '{name}'") }),
                }
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn name(&mut self) -> String {
        let mut s = String::new();
        s.push(self.chars[self.pos]);
        self.pos += 1;
        if self.chars.get(self.pos) == Some(&'_') {
            let save = self.pos;
            self.pos += 1;
            if self.chars.get(self.pos) == Some(&'{') {
                let start = self.pos + 1;
                while self.pos < self.chars.len() && self.chars[self.pos] != '}' {
                    self.pos += 1;
                }
                if self.pos < self.chars.len() {
                    s.push('_');
                    s.extend(&self.chars[start..self.pos]);
                    self.pos += 1;
                    return s;
                }
            } else {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_alphanumeric() {
                    self.pos += 1;
                }
                if self.pos > start {
                    s.push('_');
                    s.extend(&self.chars[start..self.pos]);
                    return s;
                }
            }
            self.pos = save;
        }
        s
    }
}

/// An environment with the model's generators and Λ bound.
pub fn model_env<'a>(m: &'a crate::models::Model) -> Env<'a> {
    let mut env = Env::new(&m.hopf);
    for (name, v) in &m.presentation.generators {
        if name.chars().count() == 1 {
            env.bind(name, v.clone());
        }
    }
    env.bind("Λ", m.integrals.lambda_element().clone());
    env
}
