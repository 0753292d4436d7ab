//! A text syntax for red/green spider diagrams: parser, printer, arity
//! checker, compiler against an F-Hopf bundle, and a rule checker.
//!
//! ```text
//! term := atom | "(" term ("." term)+ ")" | "[" term ("*" term)+ "]"
//! atom := "id" nat? | "swap" | "braid" | "braid'" | "had" | "had'" | "anti" | "anti'"
//!       | ("rs"|"gs") "(" nat "," nat ("," ident)? ")" | ("cup"|"cap") ("r"|"g")
//! ```
//!
//! `.` composes top to bottom, `*` tensors left to right (first factor most
//! significant). Spider legs are ordered left to right as tensor factors.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::fhopf::FHopfBundle;
use crate::frobenius::FrobeniusAlgebra;
use crate::hadamard::{proportional, Gate};
use crate::report::Report;
use crate::scalar::CycScalar;
use crate::tensor::{compose_chain, AntiLinear, Part, TensorError, TensorMap, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Green,
}

impl Color {
    fn letter(self) -> char {
        match self {
            Color::Red => 'r',
            Color::Green => 'g',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Spider { color: Color, inputs: usize, outputs: usize, phase: Option<String> },
    Had,
    HadInv,
    Cup(Color),
    Cap(Color),
    Braid,
    BraidInv,
    Swap,
    Anti,
    AntiInv,
    Id(usize),
    Compose(Vec<Node>),
    Tensor(Vec<Node>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    /// 1-based character offset.
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DslError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("arity mismatch at node {path}: {detail}")]
    Arity { path: String, detail: String },
    #[error("diagram uses had but the instance has no Hadamard gate")]
    MissingGate,
    #[error("unknown phase {0}")]
    UnknownPhase(String),
    #[error("phase {name} is a {expected:?} phase, used on a {found:?} spider")]
    PhaseColor { name: String, expected: Color, found: Color },
    #[error("{0} is not a phase")]
    NotAPhase(String),
    #[error("rule {rule}: {detail}")]
    Rule { rule: String, detail: String },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Spider { color, inputs, outputs, phase } => {
                let c = match color {
                    Color::Red => "rs",
                    Color::Green => "gs",
                };
                match phase {
                    Some(p) => write!(f, "{c}({inputs},{outputs},{p})"),
                    None => write!(f, "{c}({inputs},{outputs})"),
                }
            }
            Node::Had => write!(f, "had"),
            Node::HadInv => write!(f, "had'"),
            Node::Cup(c) => write!(f, "cup {}", c.letter()),
            Node::Cap(c) => write!(f, "cap {}", c.letter()),
            Node::Braid => write!(f, "braid"),
            Node::BraidInv => write!(f, "braid'"),
            Node::Swap => write!(f, "swap"),
            Node::Anti => write!(f, "anti"),
            Node::AntiInv => write!(f, "anti'"),
            Node::Id(1) => write!(f, "id"),
            Node::Id(k) => write!(f, "id {k}"),
            Node::Compose(xs) => write_list(f, "(", " . ", ")", xs),
            Node::Tensor(xs) => write_list(f, "[", " * ", "]", xs),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, open: &str, sep: &str, close: &str, xs: &[Node]) -> fmt::Result {
    f.write_str(open)?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(close)
}

impl Node {
    /// (inputs, outputs), or the first mismatch with its child-index path.
    pub fn arity(&self) -> Result<(usize, usize), DslError> {
        self.arity_at("root")
    }

    fn arity_at(&self, path: &str) -> Result<(usize, usize), DslError> {
        Ok(match self {
            Node::Spider { inputs, outputs, .. } => (*inputs, *outputs),
            Node::Had | Node::HadInv | Node::Anti | Node::AntiInv => (1, 1),
            Node::Cup(_) => (2, 0),
            Node::Cap(_) => (0, 2),
            Node::Braid | Node::BraidInv | Node::Swap => (2, 2),
            Node::Id(k) => (*k, *k),
            Node::Compose(xs) => {
                let mut io: Option<(usize, usize)> = None;
                for (i, x) in xs.iter().enumerate() {
                    let (a, b) = x.arity_at(&format!("{path}.{i}"))?;
                    io = Some(match io {
                        None => (a, b),
                        Some((start, prev)) if prev == a => (start, b),
                        Some((_, prev)) => {
                            return Err(DslError::Arity {
                                path: format!("{path}.{i}"),
                                detail: format!("{x} takes {a} wire(s) but receives {prev}"),
                            })
                        }
                    });
                }
                io.unwrap_or((0, 0))
            }
            Node::Tensor(xs) => {
                let mut io = (0, 0);
                for (i, x) in xs.iter().enumerate() {
                    let (a, b) = x.arity_at(&format!("{path}.{i}"))?;
                    io = (io.0 + a, io.1 + b);
                }
                io
            }
        })
    }

    pub fn phases(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_phases(&mut out);
        out
    }

    fn collect_phases<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Node::Spider { phase: Some(p), .. } => out.push(p),
            Node::Compose(xs) | Node::Tensor(xs) => xs.iter().for_each(|x| x.collect_phases(out)),
            _ => {}
        }
    }
}

struct Cursor<'t> {
    chars: Vec<char>,
    pos: usize,
    _text: &'t str,
}

impl<'t> Cursor<'t> {
    fn new(text: &'t str) -> Cursor<'t> {
        Cursor { chars: text.chars().collect(), pos: 0, _text: text }
    }

    fn skip_ws(&mut self) {
        loop {
            while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
                self.pos += 1;
            }
            if self.peek_raw() == Some('#') {
                while self.pos < self.chars.len() && self.chars[self.pos] != '\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.pos + 1, message: msg.into() })
    }

    fn found(&self) -> String {
        match self.peek_raw() {
            Some(c) => format!("found '{c}'"),
            None => "found end of input".into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            let f = self.found();
            self.err(format!("expected '{c}', {f}"))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn letters(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_lowercase() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn nat(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            let f = self.found();
            return self.err(format!("expected a number, {f}"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        match s.parse::<usize>() {
            Ok(v) if v <= 64 => Ok(v),
            _ => {
                self.pos = start;
                self.err(format!("leg count {s} out of range"))
            }
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            let ok = if self.pos == start { c.is_alphabetic() || c == '_' } else { c.is_alphanumeric() || c == '_' };
            if !ok {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            let f = self.found();
            return self.err(format!("expected a phase name, {f}"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn term(&mut self, depth: usize) -> Result<Node, ParseError> {
        if depth > 200 {
            return self.err("nesting too deep");
        }
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let xs = self.list('.', ')', depth)?;
                Ok(Node::Compose(xs))
            }
            Some('[') => {
                self.pos += 1;
                let xs = self.list('*', ']', depth)?;
                Ok(Node::Tensor(xs))
            }
            _ => self.atom(),
        }
    }

    fn list(&mut self, sep: char, close: char, depth: usize) -> Result<Vec<Node>, ParseError> {
        let mut xs = vec![self.term(depth + 1)?];
        while self.eat(sep) {
            xs.push(self.term(depth + 1)?);
        }
        if xs.len() < 2 {
            let f = self.found();
            return self.err(format!("expected '{sep}', {f}"));
        }
        self.expect(close)?;
        Ok(xs)
    }

    fn color(&mut self) -> Result<Color, ParseError> {
        if self.eat('r') {
            Ok(Color::Red)
        } else if self.eat('g') {
            Ok(Color::Green)
        } else {
            let f = self.found();
            self.err(format!("expected r or g, {f}"))
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let word = self.letters();
        let primed = |c: &mut Cursor<'_>, plain: Node, inv: Node| if c.eat('\'') { inv } else { plain };
        Ok(match word.as_str() {
            "id" => match self.peek() {
                Some(c) if c.is_ascii_digit() => Node::Id(self.nat()?),
                _ => Node::Id(1),
            },
            "swap" => Node::Swap,
            "braid" => primed(self, Node::Braid, Node::BraidInv),
            "had" => primed(self, Node::Had, Node::HadInv),
            "anti" => primed(self, Node::Anti, Node::AntiInv),
            "rs" | "gs" => {
                let color = if word == "rs" { Color::Red } else { Color::Green };
                self.expect('(')?;
                let inputs = self.nat()?;
                self.expect(',')?;
                let outputs = self.nat()?;
                let phase = if self.eat(',') { Some(self.ident()?) } else { None };
                self.expect(')')?;
                Node::Spider { color, inputs, outputs, phase }
            }
            "cup" => Node::Cup(self.color()?),
            "cap" => Node::Cap(self.color()?),
            "cupr" => Node::Cup(Color::Red),
            "cupg" => Node::Cup(Color::Green),
            "capr" => Node::Cap(Color::Red),
            "capg" => Node::Cap(Color::Green),
            "" => {
                let f = self.found();
                return self.err(format!("expected a diagram, {f}"));
            }
            w => {
                self.pos = start;
                return self.err(format!("unknown atom {w}"));
            }
        })
    }
}

/// Parses one diagram term.
pub fn parse(text: &str) -> Result<Node, ParseError> {
    let mut c = Cursor::new(text);
    let t = c.term(0)?;
    if !c.at_end() {
        let f = c.found();
        return c.err(format!("trailing input, {f}"));
    }
    Ok(t)
}

/// Parses a diagram file: a single term (named "main") or blocks `name := term;`.
pub fn parse_diagram_file(text: &str) -> Result<Vec<(String, Node)>, ParseError> {
    let mut c = Cursor::new(text);
    if c.at_end() {
        return c.err("empty diagram file");
    }
    let save = c.pos;
    let named = c.ident().is_ok() && c.eat_str(":=");
    c.pos = save;
    if !named {
        let t = c.term(0)?;
        c.eat(';');
        if !c.at_end() {
            let f = c.found();
            return c.err(format!("trailing input, {f}"));
        }
        return Ok(vec![("main".into(), t)]);
    }
    let mut out: Vec<(String, Node)> = Vec::new();
    while !c.at_end() {
        let at = c.pos;
        let name = c.ident()?;
        if !c.eat_str(":=") {
            let f = c.found();
            return c.err(format!("expected ':=', {f}"));
        }
        let t = c.term(0)?;
        c.expect(';')?;
        if out.iter().any(|(n, _)| *n == name) {
            return Err(ParseError { offset: at + 1, message: format!("duplicate diagram name {name}") });
        }
        out.push((name, t));
    }
    Ok(out)
}

/// Named constants a rule may use in its expected scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    /// λ_r with μ_r∘Δ_r = λ_r·id.
    LoopRed,
    LoopGreen,
    /// ε_r(1_g).
    EpsRed,
    /// ε_g(1_r).
    EpsGreen,
    /// Type 1 gate scalars (coproduct side, product side).
    HadA,
    HadB,
}

impl Constant {
    const ALL: [(Constant, &'static str); 6] = [
        (Constant::LoopRed, "lr"),
        (Constant::LoopGreen, "lg"),
        (Constant::EpsRed, "er"),
        (Constant::EpsGreen, "eg"),
        (Constant::HadA, "ha"),
        (Constant::HadB, "hb"),
    ];

    pub fn name(self) -> &'static str {
        Constant::ALL.iter().find(|(c, _)| *c == self).map(|(_, n)| *n).unwrap_or("?")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarExpr {
    Int(i64),
    Const(Constant),
    Mul(Box<ScalarExpr>, Box<ScalarExpr>),
    Div(Box<ScalarExpr>, Box<ScalarExpr>),
    Pow(Box<ScalarExpr>, i64),
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarExpr::Int(v) => write!(f, "{v}"),
            ScalarExpr::Const(c) => f.write_str(c.name()),
            ScalarExpr::Mul(a, b) => write!(f, "{a}*{}", Paren(b, false)),
            ScalarExpr::Div(a, b) => write!(f, "{a}/{}", Paren(b, false)),
            ScalarExpr::Pow(a, k) => write!(f, "{}^{k}", Paren(a, true)),
        }
    }
}

struct Paren<'a>(&'a ScalarExpr, bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = match self.0 {
            ScalarExpr::Mul(..) | ScalarExpr::Div(..) => true,
            ScalarExpr::Pow(..) => self.1,
            _ => false,
        };
        if wrap {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Cursor<'_> {
    fn scalar_expr(&mut self, depth: usize) -> Result<ScalarExpr, ParseError> {
        let mut e = self.scalar_factor(depth)?;
        loop {
            if self.eat('*') {
                e = ScalarExpr::Mul(Box::new(e), Box::new(self.scalar_factor(depth)?));
            } else if self.eat('/') {
                e = ScalarExpr::Div(Box::new(e), Box::new(self.scalar_factor(depth)?));
            } else {
                return Ok(e);
            }
        }
    }

    fn scalar_factor(&mut self, depth: usize) -> Result<ScalarExpr, ParseError> {
        if depth > 100 {
            return self.err("nesting too deep");
        }
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.scalar_expr(depth + 1)?;
                self.expect(')')?;
                e
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                let v = self.nat_i64()?;
                if v == 0 {
                    self.pos = at;
                    return self.err("expected scalar must be nonzero");
                }
                ScalarExpr::Int(v)
            }
            _ => {
                let at = self.pos;
                let w = self.letters();
                match Constant::ALL.iter().find(|(_, n)| *n == w) {
                    Some((c, _)) => ScalarExpr::Const(*c),
                    None => {
                        self.pos = at;
                        return self.err(format!("expected a scalar (number, lr, lg, er, eg, ha, hb), {}", self.found()));
                    }
                }
            }
        };
        if self.eat('^') {
            let neg = self.eat('-');
            let k = self.nat_i64()?;
            return Ok(ScalarExpr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn nat_i64(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        match s.parse::<i64>() {
            Ok(v) if v <= 1_000_000 => Ok(v),
            _ => {
                self.pos = start;
                self.err("expected a small number")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Proportional with a nonzero scalar; optionally the scalar it must equal.
    Proportional(Option<ScalarExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalisation {
    /// The bundle's F-algebras as assembled.
    #[default]
    AsBuilt,
    /// Quasispecial F-algebras rescaled to special: Δ/λ, λε, λ(,), g/λ.
    Special,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleCheck {
    pub name: String,
    pub lhs: Node,
    pub rhs: Node,
    pub mode: Mode,
    pub normalisation: Normalisation,
    /// Filled by [`check_rule`] in proportional mode.
    pub observed_scalar: Option<CycScalar>,
}

impl fmt::Display for RuleCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} == {}", self.name, self.lhs, self.rhs)?;
        match &self.mode {
            Mode::Exact => write!(f, " exact;"),
            Mode::Proportional(None) => write!(f, " prop;"),
            Mode::Proportional(Some(e)) => write!(f, " prop({e});"),
        }
    }
}

/// Parses a rule file: `name : lhs == rhs [exact|prop|prop(scalar)];`, with
/// `normalise special;` / `normalise built;` switching the F-algebra scaling
/// for the rules that follow. `#` starts a comment.
pub fn parse_rules(text: &str) -> Result<Vec<RuleCheck>, ParseError> {
    let mut c = Cursor::new(text);
    let mut out: Vec<RuleCheck> = Vec::new();
    let mut norm = Normalisation::AsBuilt;
    while !c.at_end() {
        let at = c.pos;
        let name = rule_name(&mut c)?;
        if name == "normalise" && c.peek() != Some(':') {
            let w = c.letters();
            norm = match w.as_str() {
                "special" => Normalisation::Special,
                "built" => Normalisation::AsBuilt,
                _ => return c.err("expected special or built"),
            };
            c.expect(';')?;
            continue;
        }
        c.expect(':')?;
        let lhs = c.term(0)?;
        if !c.eat_str("==") {
            let f = c.found();
            return c.err(format!("expected '==', {f}"));
        }
        let rhs = c.term(0)?;
        let bracket = c.eat('[');
        let mode = match c.letters().as_str() {
            "exact" => Mode::Exact,
            "prop" => {
                if c.eat('(') {
                    let e = c.scalar_expr(0)?;
                    c.expect(')')?;
                    Mode::Proportional(Some(e))
                } else {
                    Mode::Proportional(None)
                }
            }
            "" if !bracket => Mode::Exact,
            _ => return c.err("expected exact or prop"),
        };
        if bracket {
            c.expect(']')?;
        }
        c.expect(';')?;
        if out.iter().any(|r| r.name == name) {
            return Err(ParseError { offset: at + 1, message: format!("duplicate rule name {name}") });
        }
        out.push(RuleCheck { name, lhs, rhs, mode, normalisation: norm, observed_scalar: None });
    }
    Ok(out)
}

fn rule_name(c: &mut Cursor<'_>) -> Result<String, ParseError> {
    c.skip_ws();
    let start = c.pos;
    while c.pos < c.chars.len() {
        let ch = c.chars[c.pos];
        if ch.is_alphanumeric() || ch == '_' || ch == '-' {
            c.pos += 1;
        } else {
            break;
        }
    }
    if start == c.pos {
        let f = c.found();
        return c.err(format!("expected a rule name, {f}"));
    }
    Ok(c.chars[start..c.pos].iter().collect())
}

/// Rescales a quasispecial F-algebra so that μΔ = id. Returns it unchanged
/// (and false) when there is no invertible loop scalar.
pub fn make_special(f: &FrobeniusAlgebra) -> (FrobeniusAlgebra, bool) {
    let Some(l) = f.loop_scalar() else { return (f.clone(), false) };
    let Ok(li) = l.inv() else { return (f.clone(), false) };
    let mut g = f.clone();
    g.delta = f.delta.scale(&li);
    g.counit = f.counit.scale(&l);
    g.form = f.form.scale(&l);
    g.metric = f.metric.scale(&li);
    (g, true)
}

/// A bundle together with its optional gate, phase table and spider scaling.
#[derive(Clone)]
pub struct Instance<'a> {
    pub bundle: &'a FHopfBundle,
    pub gate: Option<&'a Gate>,
    /// Type 1 scalars of the gate, when it is Type 1.
    pub type1: Option<(CycScalar, CycScalar)>,
    pub normalisation: Normalisation,
    phases: BTreeMap<String, (Color, Vector)>,
    red: FrobeniusAlgebra,
    green: FrobeniusAlgebra,
    warnings: Vec<String>,
}

/// A compiled diagram with any degradation warnings (braid compiled to flip).
#[derive(Clone, Debug, PartialEq)]
pub struct Compiled {
    pub map: TensorMap,
    pub warnings: Vec<String>,
}

impl<'a> Instance<'a> {
    pub fn new(bundle: &'a FHopfBundle) -> Instance<'a> {
        Instance {
            bundle,
            gate: None,
            type1: None,
            normalisation: Normalisation::AsBuilt,
            phases: BTreeMap::new(),
            red: bundle.red.clone(),
            green: bundle.green.clone(),
            warnings: Vec::new(),
        }
    }

    pub fn with_gate(mut self, gate: &'a Gate, type1: Option<(CycScalar, CycScalar)>) -> Instance<'a> {
        self.gate = Some(gate);
        self.type1 = type1;
        self
    }

    /// The same instance with the F-algebras scaled per `n`.
    pub fn normalised(&self, n: Normalisation) -> Instance<'a> {
        let mut out = self.clone();
        out.normalisation = n;
        out.warnings.clear();
        match n {
            Normalisation::AsBuilt => {
                out.red = self.bundle.red.clone();
                out.green = self.bundle.green.clone();
            }
            Normalisation::Special => {
                let (r, rok) = make_special(&self.bundle.red);
                let (g, gok) = make_special(&self.bundle.green);
                if !rok {
                    out.warnings.push("red F-algebra is not quasispecial; left unscaled".into());
                }
                if !gok {
                    out.warnings.push("green F-algebra is not quasispecial; left unscaled".into());
                }
                out.red = r;
                out.green = g;
            }
        }
        out
    }

    pub fn algebra(&self, c: Color) -> &FrobeniusAlgebra {
        match c {
            Color::Red => &self.red,
            Color::Green => &self.green,
        }
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Registers a named phase, checked against `star` when one is given.
    pub fn add_phase(&mut self, name: &str, color: Color, alpha: Vector, star: Option<&AntiLinear>) -> Result<(), DslError> {
        if let Some(s) = star {
            if !self.algebra(color).is_phase(s, &alpha) {
                return Err(DslError::NotAPhase(name.into()));
            }
        }
        self.phases.insert(name.into(), (color, alpha));
        Ok(())
    }

    pub fn constant(&self, c: Constant) -> Option<CycScalar> {
        let n = self.bundle.order();
        match c {
            Constant::LoopRed => self.red.loop_scalar(),
            Constant::LoopGreen => self.green.loop_scalar(),
            Constant::EpsRed => Some(self.red.counit.apply(self.green.one()).coeff(0, n)),
            Constant::EpsGreen => Some(self.green.counit.apply(self.red.one()).coeff(0, n)),
            Constant::HadA => self.type1.as_ref().map(|t| t.0.clone()),
            Constant::HadB => self.type1.as_ref().map(|t| t.1.clone()),
        }
    }

    /// Evaluates an expected scalar; Err names the first undefined constant.
    pub fn eval_scalar(&self, e: &ScalarExpr) -> Result<CycScalar, String> {
        let n = self.bundle.order();
        Ok(match e {
            ScalarExpr::Int(v) => CycScalar::from_int(n, *v),
            ScalarExpr::Const(c) => self.constant(*c).ok_or_else(|| format!("{} is undefined on this instance", c.name()))?,
            ScalarExpr::Mul(a, b) => &self.eval_scalar(a)? * &self.eval_scalar(b)?,
            ScalarExpr::Div(a, b) => self.eval_scalar(a)?.try_div(&self.eval_scalar(b)?).map_err(|e| e.to_string())?,
            ScalarExpr::Pow(a, k) => self.eval_scalar(a)?.pow(*k).map_err(|e| e.to_string())?,
        })
    }

    pub fn compile(&self, node: &Node) -> Result<Compiled, DslError> {
        node.arity()?;
        for p in node.phases() {
            if !self.phases.contains_key(p) {
                return Err(DslError::UnknownPhase(p.into()));
            }
        }
        let mut warnings = Vec::new();
        let map = self.build(node, &mut warnings)?;
        warnings.sort();
        warnings.dedup();
        Ok(Compiled { map, warnings })
    }

    fn build(&self, node: &Node, warnings: &mut Vec<String>) -> Result<TensorMap, DslError> {
        let b = self.bundle;
        let s = &b.base.space;
        Ok(match node {
            Node::Spider { color, inputs, outputs, phase } => {
                let alpha = match phase {
                    Some(p) => {
                        let (pc, v) = &self.phases[p];
                        if pc != color {
                            return Err(DslError::PhaseColor { name: p.clone(), expected: *pc, found: *color });
                        }
                        Some(v)
                    }
                    None => None,
                };
                self.algebra(*color).spider(*inputs, *outputs, alpha)
            }
            Node::Had => self.gate.ok_or(DslError::MissingGate)?.h.clone(),
            Node::HadInv => self.gate.ok_or(DslError::MissingGate)?.h_inv.clone(),
            Node::Cup(c) => self.algebra(*c).form.clone(),
            Node::Cap(c) => self.algebra(*c).metric.clone(),
            Node::Anti => b.base.antipode.clone(),
            Node::AntiInv => b.base.antipode_inv.clone(),
            Node::Swap => TensorMap::flip(s, 2, 0)?,
            Node::Braid => match &b.base.braiding {
                Some(psi) => psi.clone(),
                None => {
                    warnings.push("braid compiled to flip on a non-braided bundle".into());
                    TensorMap::flip(s, 2, 0)?
                }
            },
            Node::BraidInv => match (&b.base.braiding, &b.associated.braiding) {
                (Some(_), Some(inv)) => inv.clone(),
                (Some(psi), None) => psi.invert()?,
                _ => {
                    warnings.push("braid' compiled to flip on a non-braided bundle".into());
                    TensorMap::flip(s, 2, 0)?
                }
            },
            Node::Id(k) => TensorMap::identity(s, *k),
            Node::Tensor(xs) => {
                let maps = xs.iter().map(|x| self.build(x, warnings)).collect::<Result<Vec<_>, _>>()?;
                let parts: Vec<Part<'_>> = maps.iter().map(Part::Map).collect();
                let ins = maps.iter().map(|m| m.inputs()).sum();
                compose_chain(s, ins, &[&parts])?
            }
            Node::Compose(xs) => self.build_chain(xs, warnings)?,
        })
    }

    /// Compose chains whose layers are tensors are applied layer by layer
    /// without materialising each layer.
    fn build_chain(&self, xs: &[Node], warnings: &mut Vec<String>) -> Result<TensorMap, DslError> {
        let s = &self.bundle.base.space;
        let mut layers: Vec<Vec<Slot>> = Vec::with_capacity(xs.len());
        let mut store: Vec<TensorMap> = Vec::new();
        for x in xs {
            let items: &[Node] = match x {
                Node::Tensor(ys) => ys,
                other => std::slice::from_ref(other),
            };
            let mut layer = Vec::with_capacity(items.len());
            for y in items {
                match y {
                    Node::Id(k) => layer.push(Slot::Id(*k)),
                    _ => {
                        store.push(self.build(y, warnings)?);
                        layer.push(Slot::Map(store.len() - 1));
                    }
                }
            }
            layers.push(layer);
        }
        let parts: Vec<Vec<Part<'_>>> = layers
            .iter()
            .map(|l| {
                l.iter()
                    .map(|p| match p {
                        Slot::Id(k) => Part::Id(*k),
                        Slot::Map(i) => Part::Map(&store[*i]),
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[Part<'_>]> = parts.iter().map(|p| p.as_slice()).collect();
        let ins = xs.first().map(|x| x.arity()).transpose()?.map(|a| a.0).unwrap_or(0);
        Ok(compose_chain(s, ins, &refs)?)
    }
}

enum Slot {
    Id(usize),
    Map(usize),
}

/// Compiles both sides and checks them; in proportional mode the scalar
/// s with lhs = s·rhs is recorded in `rc.observed_scalar`. Expected scalars that
/// reference undefined constants turn the check into a note.
pub fn check_rule(rc: &mut RuleCheck, inst: &Instance<'_>) -> Report {
    let mut r = Report::new();
    let id = format!("rule:{}", rc.name);
    let scaled;
    let inst = if rc.normalisation == inst.normalisation {
        inst
    } else {
        scaled = inst.normalised(rc.normalisation);
        &scaled
    };
    let (la, ra) = match (rc.lhs.arity(), rc.rhs.arity()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            r.record(id, "remunnorm", Err(e.to_string()));
            return r;
        }
    };
    if la != ra {
        r.record(id, "remunnorm", Err(format!("arities differ: {la:?} vs {ra:?}")));
        return r;
    }
    let sides = inst.compile(&rc.lhs).and_then(|l| inst.compile(&rc.rhs).map(|rr| (l, rr)));
    let (lhs, rhs) = match sides {
        Ok(x) => x,
        Err(DslError::MissingGate) => {
            r.note(id, "remunnorm", "not applicable: no Hadamard gate on this instance");
            return r;
        }
        Err(e) => {
            r.record(id, "remunnorm", Err(e.to_string()));
            return r;
        }
    };
    let mut warnings: Vec<String> = lhs.warnings.iter().chain(&rhs.warnings).cloned().collect();
    warnings.dedup();
    let suffix = if warnings.is_empty() { String::new() } else { format!(" [{}]", warnings.join("; ")) };
    match &rc.mode {
        Mode::Exact => match lhs.map.diff(&rhs.map) {
            None => r.pass_with(id, "remunnorm", format!("exact{suffix}")),
            Some(d) => r.record(id, "remunnorm", Err(format!("{d}{suffix}"))),
        },
        Mode::Proportional(expected) => {
            let expected = match expected {
                Some(e) => match inst.eval_scalar(e) {
                    Ok(v) => Some((e, v)),
                    Err(why) => {
                        r.note(id, "remunnorm", format!("not applicable: {why}"));
                        return r;
                    }
                },
                None => None,
            };
            match proportional(&lhs.map, &rhs.map) {
                Err(e) => r.record(id, "remunnorm", Err(format!("{e}{suffix}"))),
                Ok(s) if s.is_zero() => r.record(id, "remunnorm", Err("scalar is zero".into())),
                Ok(s) => {
                    let res = match &expected {
                        Some((e, v)) if *v != s => Err(format!("scalar {} but {e} = {}{suffix}", s.render(), v.render())),
                        _ => Ok(()),
                    };
                    match res {
                        Ok(()) => r.pass_with(id, "remunnorm", format!("{}{suffix}", s.render())),
                        Err(w) => r.record(id, "remunnorm", Err(w)),
                    }
                    rc.observed_scalar = Some(s);
                }
            }
        }
    }
    r
}

/// Runs every rule in order.
pub fn check_rules(rules: &mut [RuleCheck], inst: &Instance<'_>) -> Report {
    let mut r = Report::new();
    let built = inst.normalised(Normalisation::AsBuilt);
    let special = inst.normalised(Normalisation::Special);
    for rc in rules.iter_mut() {
        let i = match rc.normalisation {
            Normalisation::AsBuilt => &built,
            Normalisation::Special => &special,
        };
        r.merge(check_rule(rc, i));
    }
    r
}

pub const STD_RULES: &str = include_str!("../rules/std.rules");
pub const BRAIDED_RULES: &str = include_str!("../rules/braided.rules");

/// The shipped rule packs by name.
pub fn rule_pack(name: &str) -> Option<&'static str> {
    match name {
        "std" => Some(STD_RULES),
        "braided" => Some(BRAIDED_RULES),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{check_type1, fourier_form, gate_from_form};
    use crate::tensor::Index;
    use crate::{braided, fhopf, models};

    fn zn(n: usize) -> FHopfBundle {
        let m = models::build(&format!("kX:Z{n}")).unwrap();
        fhopf::amplify(&m.hopf, &m.integrals).unwrap()
    }

    fn run_pack(inst: &Instance<'_>, pack: &str) -> (Report, Vec<RuleCheck>) {
        let mut rules = parse_rules(rule_pack(pack).unwrap()).unwrap();
        let r = check_rules(&mut rules, inst);
        (r, rules)
    }

    fn observed<'r>(rules: &'r [RuleCheck], name: &str) -> &'r CycScalar {
        rules.iter().find(|r| r.name == name).and_then(|r| r.observed_scalar.as_ref()).unwrap()
    }

    #[test]
    fn parse_examples() {
        let t = parse("(gs(2,1) . gs(1,2))").unwrap();
        assert!(matches!(&t, Node::Compose(xs) if xs.len() == 2));
        assert_eq!(t.arity().unwrap(), (2, 2));
        assert_eq!(parse("[id * cup r]").unwrap().arity().unwrap(), (3, 1));
        let e = parse("rs(1,1,").unwrap_err();
        assert_eq!(e.offset, 8);
        assert_eq!(parse(" [ id2*cupr ] ").unwrap(), parse("[id 2 * cup r]").unwrap());
        assert!(parse("(id)").is_err());
        assert!(parse("frob").is_err());
        assert!(parse("had had").is_err());
    }

    #[test]
    fn print_round_trips() {
        for s in ["(gs(2,1) . gs(1,2))", "[id * cup r]", "(braid' . [had' * anti'] . rs(2,0,alpha))", "[id 3 * cap g * swap]", "id 0"] {
            let t = parse(s).unwrap();
            assert_eq!(t.to_string(), s);
            assert_eq!(parse(&t.to_string()).unwrap(), t);
        }
    }

    #[test]
    fn arity_errors_name_the_node() {
        match parse("(rs(1,2) . [id * rs(2,1)] . gs(1,1))").unwrap().arity() {
            Err(DslError::Arity { path, .. }) => assert_eq!(path, "root.1"),
            other => panic!("{other:?}"),
        }
        match parse("[id * (cup g . id)]").unwrap().arity() {
            Err(DslError::Arity { path, .. }) => assert_eq!(path, "root.1.1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diagram_and_rule_files() {
        let d = parse_diagram_file("a := rs(1,2);\n# comment\nb := (a2 . b);").unwrap_err();
        assert!(d.message.contains("unknown atom"), "{d:?}");
        let d = parse_diagram_file("a := rs(1,2);\nb := (rs(2,1) . gs(1,0));").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(parse_diagram_file(" had' ").unwrap()[0].0, "main");
        let r = parse_rules("x : had == had; y : id == id [prop]; normalise special; z : id == id prop(lr^-2*er/3);").unwrap();
        assert_eq!(r[0].mode, Mode::Exact);
        assert_eq!(r[1].mode, Mode::Proportional(None));
        assert_eq!(r[2].normalisation, Normalisation::Special);
        assert_eq!(r[2].to_string(), "z : id == id prop(lr^-2*er/3);");
        assert_eq!(parse_rules(&r[2].to_string()).unwrap()[0].mode, r[2].mode);
        assert!(parse_rules("x : id == id prop(0);").is_err());
        assert!(parse_rules("x : id == id; x : id == id;").is_err());
    }

    #[test]
    fn compile_matches_bundle() {
        let b = zn(3);
        let inst = Instance::new(&b);
        let lambda = inst.compile(&parse("gs(0,1)").unwrap()).unwrap().map;
        let sum = Vector::from_terms((0..3).map(|i| (i as Index, CycScalar::one(3))));
        assert_eq!(lambda.as_element(), &sum);
        let a = inst.compile(&parse("(rs(2,1) . rs(1,1))").unwrap()).unwrap().map;
        assert_eq!(a, inst.compile(&parse("rs(2,1)").unwrap()).unwrap().map);
        for (m, n) in [(0, 0), (1, 3), (3, 1), (2, 2), (0, 2)] {
            for c in [Color::Red, Color::Green] {
                let t = Node::Spider { color: c, inputs: m, outputs: n, phase: None };
                assert_eq!(inst.compile(&t).unwrap().map, inst.algebra(c).spider(m, n, None));
            }
        }
    }

    #[test]
    fn trace_of_red_metric_is_dimension() {
        let b = zn(2);
        let v = Instance::new(&b).compile(&parse("(cap r . cup r)").unwrap()).unwrap().map;
        let direct = (0..2).fold(CycScalar::zero(2), |acc, i| {
            let x = b.base.basis(i);
            let xinv = b.base.s(&x);
            &acc + &b.red.pair(&xinv, &x)
        });
        assert_eq!(v.as_element().coeff(0, 2), direct);
        assert_eq!(direct, CycScalar::from_int(2, 2));
    }

    #[test]
    fn green_fusion_brute_force_z2() {
        let b = zn(2);
        let inst = Instance::new(&b);
        let lhs = inst.compile(&parse("(gs(2,1).gs(1,2))").unwrap()).unwrap().map;
        // kℤ₂ green: x∘y = δ_{x,y} x, Δ_g x = x⊗x.
        for i in 0..2u64 {
            for j in 0..2u64 {
                let want = if i == j { Vector::basis(i * 2 + i, CycScalar::one(2)) } else { Vector::zero() };
                assert_eq!(lhs.column(i * 2 + j), &want);
            }
        }
        assert_eq!(lhs, inst.compile(&parse("gs(2,2)").unwrap()).unwrap().map);
    }

    #[test]
    fn std_pack_on_z2() {
        let b = zn(2);
        let inst = Instance::new(&b);
        let (r, rules) = run_pack(&inst, "std");
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let two = CycScalar::from_int(2, 2);
        assert_eq!(observed(&rules, "unnormalised-bialgebra"), &two);
        assert_eq!(observed(&rules, "unnormalised-unit"), &two);
        assert_eq!(observed(&rules, "red-loop"), &two);
        assert_eq!(observed(&rules, "red-double-loop"), &CycScalar::from_int(2, 4));
        assert_eq!(observed(&rules, "green-loop"), &CycScalar::one(2));
        assert_eq!(r.get("rule:had-colour-product").unwrap().status, crate::report::Status::Note);
        assert_eq!(inst.normalised(Normalisation::Special).constant(Constant::EpsRed), Some(two));
    }

    #[test]
    fn type1_colour_change_on_z3() {
        let b = zn(3);
        let mut theta = fourier_form(&b).unwrap();
        let gate = gate_from_form(&b, &theta).unwrap();
        assert!(check_type1(&b, &mut theta, &gate).all_passed());
        let inst = Instance::new(&b).with_gate(&gate, Some(theta.quasi_scalars.clone()));
        let (r, rules) = run_pack(&inst, "std");
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(observed(&rules, "had-colour-coproduct"), &CycScalar::one(3));
        assert_eq!(observed(&rules, "had-colour-product"), &CycScalar::from_int(3, 3));
    }

    #[test]
    fn wrong_expected_scalar_fails() {
        let b = zn(2);
        let mut rules = parse_rules("loop : (rs(1,2) . rs(2,1)) == id prop(lr^2);").unwrap();
        let r = check_rules(&mut rules, &Instance::new(&b));
        assert!(!r.all_passed());
        let mut rules = parse_rules("zero : (rs(1,2) . rs(2,1)) == (rs(1,0) . rs(0,1)) prop;").unwrap();
        assert!(!check_rules(&mut rules, &Instance::new(&b)).all_passed());
    }

    #[test]
    fn phases_and_braid_fallback() {
        let m = models::build("kX:Z2").unwrap();
        let b = fhopf::amplify(&m.hopf, &m.integrals).unwrap();
        let mut inst = Instance::new(&b);
        let x = b.base.basis(0).sub(&b.base.basis(1));
        assert!(matches!(inst.add_phase("bad", Color::Green, b.base.basis(1), m.star.as_ref()), Err(DslError::NotAPhase(_))));
        assert!(inst.add_phase("a", Color::Green, x.clone(), m.star.as_ref()).is_ok());
        let t = parse("gs(1,1,a)").unwrap();
        assert_eq!(inst.compile(&t).unwrap().map, b.green.spider(1, 1, Some(&x)));
        assert!(matches!(inst.compile(&parse("rs(1,1,a)").unwrap()), Err(DslError::PhaseColor { .. })));
        assert!(matches!(inst.compile(&parse("gs(1,1,zz)").unwrap()), Err(DslError::UnknownPhase(_))));
        assert!(matches!(inst.compile(&parse("had").unwrap()), Err(DslError::MissingGate)));
        let c = inst.compile(&parse("braid").unwrap()).unwrap();
        assert_eq!(c.map, TensorMap::flip(&b.base.space, 2, 0).unwrap());
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn braided_pack_on_bqsl2() {
        let m = models::build("uqsl2:3").unwrap();
        let bh = braided::transmute(&m.hopf).unwrap();
        let ints = braided::braided_integrals(&bh, &m.integrals, None).unwrap();
        let bundle = braided::braided_amplify(&bh, &ints).unwrap();
        let inst = Instance::new(&bundle);
        let (r, _) = run_pack(&inst, "braided");
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let mut swapped = parse_rules("flat : (rs(2,1) . gs(1,2)) == ([gs(1,2) * gs(1,2)] . [id * swap * id] . [rs(2,1) * rs(2,1)]) exact;").unwrap();
        assert!(!check_rules(&mut swapped, &inst).all_passed());
    }
}
