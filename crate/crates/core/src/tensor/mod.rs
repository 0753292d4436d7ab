//! Sparse exact multilinear maps H^{⊗m} → H^{⊗n} over a single named basis.
//!
//! Multi-indices are flattened base `dim`, first tensor factor most significant.
//! The leftmost diagram wire is the first factor; maps compose top to bottom.

mod linalg;

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::scalar::CycScalar;

pub use linalg::{Matrix, RowReducer};

pub type Index = u64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TensorError {
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("maps live on different spaces")]
    SpaceMismatch,
    #[error("singular map: rank {rank} of {dim}")]
    Singular { rank: usize, dim: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
}

/// The underlying vector space of H: a field order and unique basis labels.
#[derive(Debug, PartialEq, Eq)]
pub struct Space {
    order: u32,
    labels: Vec<String>,
}

impl Space {
    pub fn new(order: u32, labels: Vec<String>) -> Result<Arc<Space>, TensorError> {
        if labels.is_empty() {
            return Err(TensorError::InvalidSpace("empty basis".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(TensorError::InvalidSpace(format!("duplicate label {l:?}")));
            }
        }
        Ok(Arc::new(Space { order, labels }))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Root-of-unity order of the scalar field.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn zero(&self) -> CycScalar {
        CycScalar::zero(self.order)
    }

    pub fn one(&self) -> CycScalar {
        CycScalar::one(self.order)
    }

    /// dim^k, the number of basis tensors of H^{⊗k}.
    pub fn power(&self, k: usize) -> Index {
        (self.dim() as Index).pow(k as u32)
    }

    /// Digits of a flattened multi-index, first factor first.
    pub fn split(&self, mut idx: Index, k: usize) -> SmallVec<[usize; 8]> {
        let d = self.dim() as Index;
        let mut out: SmallVec<[usize; 8]> = SmallVec::from_elem(0, k);
        for slot in out.iter_mut().rev() {
            *slot = (idx % d) as usize;
            idx /= d;
        }
        out
    }

    pub fn join(&self, digits: &[usize]) -> Index {
        digits.iter().fold(0, |acc, x| acc * self.dim() as Index + *x as Index)
    }

    pub fn multi_label(&self, idx: Index, k: usize) -> String {
        if k == 0 {
            return "1".into();
        }
        self.split(idx, k).iter().map(|i| self.labels[*i].as_str()).collect::<Vec<_>>().join(" ⊗ ")
    }

    pub fn same(a: &Arc<Space>, b: &Arc<Space>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

/// A sparse vector: sorted (index, nonzero coefficient) pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Vector {
    terms: Vec<(Index, CycScalar)>,
}

impl Vector {
    pub fn zero() -> Vector {
        Vector { terms: Vec::new() }
    }

    pub fn basis(i: Index, coeff: CycScalar) -> Vector {
        if coeff.is_zero() {
            return Vector::zero();
        }
        Vector { terms: vec![(i, coeff)] }
    }

    /// Sums arbitrary (possibly repeated) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Index, CycScalar)>) -> Vector {
        let mut acc = Accum::new();
        for (i, c) in terms {
            acc.push(i, c);
        }
        acc.finish()
    }

    pub fn terms(&self) -> &[(Index, CycScalar)] {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Index, CycScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, i: Index) -> Option<&CycScalar> {
        self.terms.binary_search_by_key(&i, |t| t.0).ok().map(|p| &self.terms[p].1)
    }

    pub fn coeff(&self, i: Index, order: u32) -> CycScalar {
        self.get(i).cloned().unwrap_or_else(|| CycScalar::zero(order))
    }

    pub fn scale(&self, c: &CycScalar) -> Vector {
        if c.is_zero() {
            return Vector::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Vector { terms: self.terms.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    pub fn neg(&self) -> Vector {
        Vector { terms: self.terms.iter().map(|(i, x)| (*i, -x)).collect() }
    }

    pub fn conj(&self) -> Vector {
        Vector { terms: self.terms.iter().map(|(i, x)| (*i, x.conj())).collect() }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.merge(other, true)
    }

    fn merge(&self, other: &Vector, negate: bool) -> Vector {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut a, mut b) = (self.terms.iter().peekable(), other.terms.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, if negate { -y } else { y.clone() }));
                        b.next();
                    } else {
                        let s = if negate { x - y } else { x + y };
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, if negate { -y } else { y.clone() }));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Vector { terms: out }
    }

    /// Tensor product; `right_size` is the number of basis tensors of the right factor.
    pub fn tensor(&self, other: &Vector, right_size: Index) -> Vector {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (i, x) in &self.terms {
            for (j, y) in &other.terms {
                terms.push((i * right_size + j, x * y));
            }
        }
        Vector { terms }
    }

    /// If `self = s * other` for a scalar s, returns s (zero vectors give None).
    pub fn ratio_to(&self, other: &Vector) -> Option<CycScalar> {
        if self.len() != other.len() || other.is_zero() {
            return None;
        }
        let s = self.terms[0].1.try_div(&other.terms[0].1).ok()?;
        for ((i, x), (j, y)) in self.terms.iter().zip(other.terms.iter()) {
            if i != j || *x != y * &s {
                return None;
            }
        }
        Some(s)
    }

    pub fn render(&self, space: &Space, arity: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(i, c)| format!("({c})·[{}]", space.multi_label(*i, arity)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Unsorted accumulator for building vectors from many contributions.
#[derive(Default)]
pub struct Accum {
    terms: Vec<(Index, CycScalar)>,
}

impl Accum {
    pub fn new() -> Accum {
        Accum { terms: Vec::new() }
    }

    pub fn push(&mut self, i: Index, c: CycScalar) {
        if !c.is_zero() {
            self.terms.push((i, c));
        }
    }

    pub fn add_scaled(&mut self, v: &Vector, c: &CycScalar) {
        if c.is_zero() {
            return;
        }
        for (i, x) in v.iter() {
            self.terms.push((*i, if c.is_one() { x.clone() } else { x * c }));
        }
    }

    pub fn finish(mut self) -> Vector {
        self.terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(Index, CycScalar)> = Vec::with_capacity(self.terms.len());
        for (i, c) in self.terms {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += &c,
                _ => {
                    if let Some((_, acc)) = out.last() {
                        if acc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((i, c));
                }
            }
        }
        if out.last().is_some_and(|(_, c)| c.is_zero()) {
            out.pop();
        }
        Vector { terms: out }
    }
}

/// A linear map H^{⊗m} → H^{⊗n} stored column by column.
#[derive(Clone)]
pub struct TensorMap {
    space: Arc<Space>,
    inputs: usize,
    outputs: usize,
    cols: Vec<Vector>,
}

impl PartialEq for TensorMap {
    fn eq(&self, other: &TensorMap) -> bool {
        Space::same(&self.space, &other.space)
            && self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.cols == other.cols
    }
}

impl fmt::Debug for TensorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TensorMap({} -> {})", self.inputs, self.outputs)?;
        for (j, c) in self.cols.iter().enumerate() {
            if !c.is_zero() {
                writeln!(f, "  [{}] ↦ {}", self.space.multi_label(j as Index, self.inputs), c.render(&self.space, self.outputs))?;
            }
        }
        Ok(())
    }
}

impl TensorMap {
    pub fn zero(space: &Arc<Space>, inputs: usize, outputs: usize) -> TensorMap {
        let cols = vec![Vector::zero(); space.power(inputs) as usize];
        TensorMap { space: space.clone(), inputs, outputs, cols }
    }

    pub fn from_fn(
        space: &Arc<Space>,
        inputs: usize,
        outputs: usize,
        mut f: impl FnMut(Index) -> Vector,
    ) -> TensorMap {
        let cols = (0..space.power(inputs)).map(&mut f).collect();
        TensorMap { space: space.clone(), inputs, outputs, cols }
    }

    pub fn from_columns(space: &Arc<Space>, inputs: usize, outputs: usize, cols: Vec<Vector>) -> Result<TensorMap, TensorError> {
        if cols.len() as Index != space.power(inputs) {
            return Err(TensorError::Arity(format!("expected {} columns, got {}", space.power(inputs), cols.len())));
        }
        let bound = space.power(outputs);
        if cols.iter().any(|c| c.iter().any(|(i, _)| *i >= bound)) {
            return Err(TensorError::Arity("output index out of range".into()));
        }
        Ok(TensorMap { space: space.clone(), inputs, outputs, cols })
    }

    pub fn identity(space: &Arc<Space>, m: usize) -> TensorMap {
        TensorMap::from_fn(space, m, m, |j| Vector::basis(j, space.one()))
    }

    /// Transposition of wires i and i+1 among `arity` wires.
    pub fn flip(space: &Arc<Space>, arity: usize, i: usize) -> Result<TensorMap, TensorError> {
        if i + 1 >= arity {
            return Err(TensorError::Arity(format!("flip({i}) on {arity} wires")));
        }
        Ok(TensorMap::from_fn(space, arity, arity, |j| {
            let mut d = space.split(j, arity);
            d.swap(i, i + 1);
            Vector::basis(space.join(&d), space.one())
        }))
    }

    /// The (0,k) map picking out an element of H^{⊗k}.
    pub fn element(space: &Arc<Space>, k: usize, v: Vector) -> TensorMap {
        TensorMap { space: space.clone(), inputs: 0, outputs: k, cols: vec![v] }
    }

    /// The (k,0) functional with the given coefficients on basis tensors.
    pub fn functional(space: &Arc<Space>, k: usize, v: &Vector) -> TensorMap {
        let mut m = TensorMap::zero(space, k, 0);
        for (i, c) in v.iter() {
            m.cols[*i as usize] = Vector::basis(0, c.clone());
        }
        m
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    /// The same coefficients viewed on another space of equal dimension and order.
    pub fn with_space(&self, space: &Arc<Space>) -> Result<TensorMap, TensorError> {
        if space.dim() != self.space.dim() || space.order() != self.space.order() {
            return Err(TensorError::SpaceMismatch);
        }
        Ok(TensorMap { space: space.clone(), ..self.clone() })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.inputs, self.outputs)
    }

    pub fn column(&self, j: Index) -> &Vector {
        &self.cols[j as usize]
    }

    pub fn columns(&self) -> &[Vector] {
        &self.cols
    }

    pub fn set_column(&mut self, j: Index, v: Vector) {
        self.cols[j as usize] = v;
    }

    /// For a (0,k) map, the element it names.
    pub fn as_element(&self) -> &Vector {
        debug_assert_eq!(self.inputs, 0);
        &self.cols[0]
    }

    /// For a (k,0) map, the value on a basis tensor.
    pub fn value_at(&self, j: Index) -> CycScalar {
        self.cols[j as usize].coeff(0, self.space.order())
    }

    /// For a (k,0) map, its coefficient vector indexed by inputs.
    pub fn as_covector(&self) -> Vector {
        Vector::from_terms(self.cols.iter().enumerate().filter_map(|(j, c)| c.get(0).map(|x| (j as Index, x.clone()))))
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        if v.len() == 1 {
            let (i, c) = &v.terms()[0];
            return self.cols[*i as usize].scale(c);
        }
        let mut acc = Accum::new();
        for (i, c) in v.iter() {
            acc.add_scaled(&self.cols[*i as usize], c);
        }
        acc.finish()
    }

    /// `self` followed by `then` (diagrammatically: self on top).
    pub fn compose(&self, then: &TensorMap) -> Result<TensorMap, TensorError> {
        if !Space::same(&self.space, &then.space) {
            return Err(TensorError::SpaceMismatch);
        }
        if self.outputs != then.inputs {
            return Err(TensorError::Arity(format!(
                "cannot compose ({},{}) with ({},{})",
                self.inputs, self.outputs, then.inputs, then.outputs
            )));
        }
        let cols = self.cols.iter().map(|c| then.apply(c)).collect();
        Ok(TensorMap { space: self.space.clone(), inputs: self.inputs, outputs: then.outputs, cols })
    }

    pub fn tensor(&self, other: &TensorMap) -> Result<TensorMap, TensorError> {
        if !Space::same(&self.space, &other.space) {
            return Err(TensorError::SpaceMismatch);
        }
        let right_in = self.space.power(other.inputs);
        let right_out = self.space.power(other.outputs);
        Ok(TensorMap::from_fn(&self.space, self.inputs + other.inputs, self.outputs + other.outputs, |j| {
            self.cols[(j / right_in) as usize].tensor(&other.cols[(j % right_in) as usize], right_out)
        }))
    }

    fn zip(&self, other: &TensorMap, f: impl Fn(&Vector, &Vector) -> Vector) -> Result<TensorMap, TensorError> {
        if !Space::same(&self.space, &other.space) {
            return Err(TensorError::SpaceMismatch);
        }
        if self.arity() != other.arity() {
            return Err(TensorError::Arity(format!("{:?} vs {:?}", self.arity(), other.arity())));
        }
        let cols = self.cols.iter().zip(other.cols.iter()).map(|(a, b)| f(a, b)).collect();
        Ok(TensorMap { space: self.space.clone(), inputs: self.inputs, outputs: self.outputs, cols })
    }

    pub fn add(&self, other: &TensorMap) -> Result<TensorMap, TensorError> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &TensorMap) -> Result<TensorMap, TensorError> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &CycScalar) -> TensorMap {
        TensorMap { cols: self.cols.iter().map(|v| v.scale(c)).collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    /// Exchanges inputs and outputs: T(f)(out ↦ in) with the same coefficients.
    pub fn transpose(&self) -> TensorMap {
        let mut rows: Vec<Vec<(Index, CycScalar)>> = vec![Vec::new(); self.space.power(self.outputs) as usize];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                rows[*i as usize].push((j as Index, x.clone()));
            }
        }
        TensorMap {
            space: self.space.clone(),
            inputs: self.outputs,
            outputs: self.inputs,
            cols: rows.into_iter().map(|t| Vector { terms: t }).collect(),
        }
    }

    /// Entrywise complex conjugate of the coefficients.
    pub fn conj(&self) -> TensorMap {
        TensorMap { cols: self.cols.iter().map(|v| v.conj()).collect(), ..self.clone() }
    }

    /// Human-readable description of the first column where two maps differ.
    pub fn diff(&self, other: &TensorMap) -> Option<String> {
        if self.arity() != other.arity() {
            return Some(format!("arity {:?} vs {:?}", self.arity(), other.arity()));
        }
        for (j, (a, b)) in self.cols.iter().zip(other.cols.iter()).enumerate() {
            if a != b {
                return Some(format!(
                    "at [{}]: {} vs {}",
                    self.space.multi_label(j as Index, self.inputs),
                    a.render(&self.space, self.outputs),
                    b.render(&self.space, other.outputs)
                ));
            }
        }
        None
    }

    /// Dense matrix with rows indexed by outputs and columns by inputs.
    pub fn as_matrix(&self) -> Matrix {
        let rows = self.space.power(self.outputs) as usize;
        let mut m = Matrix::zero(self.space.order(), rows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                m.set(*i as usize, j, x.clone());
            }
        }
        m
    }

    pub fn from_matrix(space: &Arc<Space>, inputs: usize, outputs: usize, m: &Matrix) -> Result<TensorMap, TensorError> {
        if m.rows() as Index != space.power(outputs) || m.cols() as Index != space.power(inputs) {
            return Err(TensorError::Arity("matrix shape does not match arities".into()));
        }
        Ok(TensorMap::from_fn(space, inputs, outputs, |j| {
            Vector::from_terms((0..m.rows()).map(|i| (i as Index, m.get(i, j as usize).clone())))
        }))
    }

    /// Inverse of a (1,1) map; for a (2,0) form the (0,2) metric satisfying the
    /// snake identities, and vice versa.
    pub fn invert(&self) -> Result<TensorMap, TensorError> {
        let d = self.space.dim();
        match self.arity() {
            (1, 1) => {
                let inv = self.as_matrix().inverse()?;
                TensorMap::from_matrix(&self.space, 1, 1, &inv)
            }
            (2, 0) | (0, 2) => {
                let b = self.pairing_matrix();
                let inv = b.inverse()?;
                let v = Vector::from_terms(
                    (0..d).flat_map(|a| (0..d).map(move |c| (a, c))).map(|(a, c)| ((a * d + c) as Index, inv.get(a, c).clone())),
                );
                Ok(if self.inputs == 2 {
                    TensorMap::element(&self.space, 2, v)
                } else {
                    TensorMap::functional(&self.space, 2, &v)
                })
            }
            other => Err(TensorError::Arity(format!("cannot invert a {other:?} map"))),
        }
    }

    /// For a (2,0) form or (0,2) element, the d×d coefficient matrix B[a][b].
    pub fn pairing_matrix(&self) -> Matrix {
        let d = self.space.dim();
        let mut m = Matrix::zero(self.space.order(), d, d);
        let v = if self.inputs == 2 { self.as_covector() } else { self.as_element().clone() };
        for (i, x) in v.iter() {
            m.set(*i as usize / d, *i as usize % d, x.clone());
        }
        m
    }
}

/// One slice of a layered diagram: identities and maps placed side by side.
#[derive(Clone, Copy)]
pub enum Part<'a> {
    Id(usize),
    Map(&'a TensorMap),
}

impl Part<'_> {
    fn inputs(&self) -> usize {
        match self {
            Part::Id(k) => *k,
            Part::Map(m) => m.inputs,
        }
    }

    fn outputs(&self) -> usize {
        match self {
            Part::Id(k) => *k,
            Part::Map(m) => m.outputs,
        }
    }
}

/// Applies a layer of side-by-side parts to a vector in H^{⊗w}, without
/// materialising the layer as a tensor.
pub fn apply_layer(space: &Space, v: &Vector, parts: &[Part<'_>]) -> Vector {
    let in_sizes: SmallVec<[Index; 8]> = parts.iter().map(|p| space.power(p.inputs())).collect();
    let out_sizes: SmallVec<[Index; 8]> = parts.iter().map(|p| space.power(p.outputs())).collect();
    let mut acc = Accum::new();
    let mut cur: Vec<(Index, CycScalar)> = Vec::new();
    let mut next: Vec<(Index, CycScalar)> = Vec::new();
    let mut chunks: SmallVec<[Index; 8]> = SmallVec::from_elem(0, parts.len());
    for (idx, c) in v.iter() {
        let mut rest = *idx;
        for k in (0..parts.len()).rev() {
            chunks[k] = rest % in_sizes[k];
            rest /= in_sizes[k];
        }
        cur.clear();
        cur.push((0, c.clone()));
        for (k, part) in parts.iter().enumerate() {
            next.clear();
            match part {
                Part::Id(_) => {
                    for (i, x) in cur.drain(..) {
                        next.push((i * out_sizes[k] + chunks[k], x));
                    }
                }
                Part::Map(m) => {
                    let col = &m.cols[chunks[k] as usize];
                    for (i, x) in cur.iter() {
                        for (j, y) in col.iter() {
                            next.push((i * out_sizes[k] + j, x * y));
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
            if cur.is_empty() {
                break;
            }
        }
        for (i, x) in cur.drain(..) {
            acc.push(i, x);
        }
    }
    acc.finish()
}

/// Applies successive layers (top to bottom).
pub fn apply_chain(space: &Space, v: &Vector, layers: &[&[Part<'_>]]) -> Vector {
    let mut cur = v.clone();
    for layer in layers {
        if cur.is_zero() {
            break;
        }
        cur = apply_layer(space, &cur, layer);
    }
    cur
}

/// Materialises a chain of layers acting on `inputs` wires as a single map.
pub fn compose_chain(space: &Arc<Space>, inputs: usize, layers: &[&[Part<'_>]]) -> Result<TensorMap, TensorError> {
    let mut width = inputs;
    for layer in layers {
        let w: usize = layer.iter().map(|p| p.inputs()).sum();
        if w != width {
            return Err(TensorError::Arity(format!("layer expects {w} wires, got {width}")));
        }
        for p in layer.iter() {
            if let Part::Map(m) = p {
                if !Space::same(space, &m.space) {
                    return Err(TensorError::SpaceMismatch);
                }
            }
        }
        width = layer.iter().map(|p| p.outputs()).sum();
    }
    Ok(TensorMap::from_fn(space, inputs, width, |j| apply_chain(space, &Vector::basis(j, space.one()), layers)))
}

/// An antilinear map: coefficients are conjugated on input, then the tensor applied.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiLinear(pub TensorMap);

impl AntiLinear {
    pub fn apply(&self, v: &Vector) -> Vector {
        self.0.apply(&v.conj())
    }

    pub fn map(&self) -> &TensorMap {
        &self.0
    }

    /// Composite `self` then `then`, both antilinear: a linear map.
    pub fn then_anti(&self, then: &AntiLinear) -> TensorMap {
        TensorMap::from_fn(self.0.space(), self.0.inputs, then.0.outputs, |j| then.apply(self.0.column(j)))
    }

    /// Composite `self` then a linear map: antilinear.
    pub fn then_linear(&self, then: &TensorMap) -> Result<AntiLinear, TensorError> {
        Ok(AntiLinear(self.0.compose(then)?))
    }

    /// Composite of a linear map followed by `self`: antilinear.
    pub fn after_linear(&self, first: &TensorMap) -> AntiLinear {
        AntiLinear(TensorMap::from_fn(first.space(), first.inputs, self.0.outputs, |j| {
            self.0.apply(&first.column(j).conj())
        }))
    }

    /// Side-by-side antilinear maps.
    pub fn tensor(&self, other: &AntiLinear) -> Result<AntiLinear, TensorError> {
        Ok(AntiLinear(self.0.tensor(&other.0)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space2() -> Arc<Space> {
        Space::new(3, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn identity_and_flip() {
        let s = space2();
        let id = TensorMap::identity(&s, 1);
        assert_eq!(id.compose(&id).unwrap(), id);
        let f = TensorMap::flip(&s, 2, 0).unwrap();
        assert_eq!(f.compose(&f).unwrap(), TensorMap::identity(&s, 2));
        assert!(TensorMap::flip(&s, 2, 1).is_err());
        assert_eq!(id.invert().unwrap(), id);
    }

    #[test]
    fn arity_mismatch() {
        let s = space2();
        let id = TensorMap::identity(&s, 1);
        let id2 = TensorMap::identity(&s, 2);
        assert!(matches!(id.compose(&id2), Err(TensorError::Arity(_))));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(Space::new(1, vec!["x".into(), "x".into()]).is_err());
    }

    #[test]
    fn layer_matches_tensor_compose() {
        let s = space2();
        let q = CycScalar::q(3);
        let m = TensorMap::from_fn(&s, 1, 1, |j| Vector::from_terms([(0, q.clone()), (1 - j, CycScalar::from_int(3, 2))]));
        let f = TensorMap::flip(&s, 2, 0).unwrap();
        let id = TensorMap::identity(&s, 1);
        let direct = m.tensor(&id).unwrap().compose(&f).unwrap();
        let chained = compose_chain(&s, 2, &[&[Part::Map(&m), Part::Id(1)], &[Part::Map(&f)]]).unwrap();
        assert_eq!(direct, chained);
    }

    #[test]
    fn accum_cancels() {
        let one = CycScalar::one(3);
        let v = Vector::from_terms([(2, one.clone()), (1, one.clone()), (2, -&one)]);
        assert_eq!(v.terms(), &[(1, one)]);
    }

    #[test]
    fn form_inversion_snake() {
        let s = space2();
        let form = TensorMap::functional(
            &s,
            2,
            &Vector::from_terms([(0, CycScalar::from_int(3, 1)), (1, CycScalar::q(3)), (3, CycScalar::from_int(3, 2))]),
        );
        let metric = form.invert().unwrap();
        let snake = compose_chain(&s, 1, &[&[Part::Id(1), Part::Map(&metric)], &[Part::Map(&form), Part::Id(1)]]).unwrap();
        assert_eq!(snake, TensorMap::identity(&s, 1));
        let snake2 = compose_chain(&s, 1, &[&[Part::Map(&metric), Part::Id(1)], &[Part::Id(1), Part::Map(&form)]]).unwrap();
        assert_eq!(snake2, TensorMap::identity(&s, 1));
    }
}
